use std::collections::HashMap;

use crate::base::BaseSystem;
use crate::bundle::{Bundle, Charts};
use crate::error::Result;
use crate::graph::{GraphPoint, MetricGraph};

/// Hash grid over (base coordinate, fibre edge, arc length) for radius
/// queries in the bundle metric.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    base_cell: f64,
    base_cells: Option<i64>,
    fibre_cell: f64,
    cells: HashMap<(i64, usize, i64), Vec<usize>>,
}

impl SpatialIndex {
    pub fn new(base: &BaseSystem, cell: f64) -> Self {
        let (base_cell, base_cells) = match base.coordinate_period() {
            Some(p) => {
                let n = ((p / cell).floor() as i64).max(1);
                (p / n as f64, Some(n))
            }
            None => (cell, None),
        };
        SpatialIndex { base_cell, base_cells, fibre_cell: cell, cells: HashMap::new() }
    }

    fn base_key(&self, c: f64) -> i64 {
        let k = (c / self.base_cell).floor() as i64;
        match self.base_cells {
            Some(n) => k.rem_euclid(n),
            None => k,
        }
    }

    fn fibre_key(&self, g: &MetricGraph, y: &GraphPoint) -> i64 {
        (y.t * g.length(y.edge) / self.fibre_cell).floor() as i64
    }

    pub fn insert(&mut self, g: &MetricGraph, i: usize, c: f64, y: &GraphPoint) {
        let key = (self.base_key(c), y.edge, self.fibre_key(g, y));
        self.cells.entry(key).or_default().push(i);
    }

    /// Superset of the indexed points within `radius` of `(c, y)`. On
    /// monodromy bundles both charts are searched.
    pub fn candidates(&self, bundle: &Bundle, c: f64, y: &GraphPoint, radius: f64, out: &mut Vec<usize>) -> Result<()> {
        out.clear();
        let g = &bundle.fibre;
        let mut ys = vec![*y];
        if let Charts::Monodromy { gluing, inverse } = &bundle.charts {
            ys.push(gluing.eval(g, y)?);
            ys.push(inverse.eval(g, y)?);
        }
        let lo = ((c - radius) / self.base_cell).floor() as i64;
        let hi = ((c + radius) / self.base_cell).floor() as i64;
        let mut base_keys: Vec<i64> = (lo..=hi)
            .map(|k| match self.base_cells {
                Some(n) => k.rem_euclid(n),
                None => k,
            })
            .collect();
        base_keys.sort_unstable();
        base_keys.dedup();
        let mut fibre_keys: Vec<(usize, i64)> = Vec::new();
        for v in &ys {
            for (e, a, b) in g.ball(v, radius) {
                let len = g.length(e);
                let ka = (a * len / self.fibre_cell).floor() as i64;
                let kb = (b * len / self.fibre_cell).floor() as i64;
                fibre_keys.extend((ka..=kb).map(|k| (e, k)));
            }
        }
        fibre_keys.sort_unstable();
        fibre_keys.dedup();
        for &bk in &base_keys {
            for &(e, fk) in &fibre_keys {
                if let Some(v) = self.cells.get(&(bk, e, fk)) {
                    out.extend_from_slice(v);
                }
            }
        }
        Ok(())
    }
}
