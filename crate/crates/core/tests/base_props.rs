use bundlemin_core::base::{
    adding_machine, circle_rotation, golden, quotient_base, sturmian, BasePoint, BaseSystem, DoubledCantor,
    Side, TernaryCode, WordSide,
};
use proptest::prelude::*;

fn digits_plus_one(d: &[u8]) -> Vec<u8> {
    // 0/2 digits, least significant first, with carry
    let mut out = d.to_vec();
    for x in out.iter_mut() {
        if *x == 0 {
            *x = 2;
            return out;
        }
        *x = 0;
    }
    out
}

proptest! {
    #[test]
    fn odometer_adds_one(bits in any::<u64>(), k in 1u32..=40) {
        let c = TernaryCode::new(bits, k);
        prop_assert_eq!(c.succ().digits(), digits_plus_one(&c.digits()));
        prop_assert_eq!(c.succ().pred(), c);
        prop_assert_eq!(c.add(5).sub(5), c);
    }

    #[test]
    fn point_text_round_trip(theta in 0.0f64..1.0, bits in any::<u64>()) {
        for p in [BasePoint::angle(theta), BasePoint::TernaryCode { code: TernaryCode::new(bits, 30) }] {
            prop_assert_eq!(BasePoint::decode(&p.encode()).unwrap(), p);
        }
    }

    #[test]
    fn preimages_invert(seed in 0u64..1000) {
        let dc = DoubledCantor::with_default_center(20).unwrap();
        let systems = [
            circle_rotation(golden()).unwrap(),
            adding_machine(20).unwrap(),
            BaseSystem::Doubled(dc.clone()),
            quotient_base(&BaseSystem::Doubled(dc)).unwrap(),
            sturmian(golden(), 30).unwrap(),
        ];
        for bs in &systems {
            for x in bs.sampler(5, seed) {
                // orbit points past the blow-up depth are outside the model
                let Ok(fx) = bs.apply(&x) else { continue };
                let Ok(pre) = bs.preimages(&fx) else { continue };
                prop_assert!(pre.iter().any(|p| bs.metric(p, &x).unwrap() < 1e-12), "{} {:?}", bs.name(), x);
                for p in &pre {
                    prop_assert!(bs.metric(&bs.apply(p).unwrap(), &fx).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sturmian_shift_is_rotation(z in 0.0f64..1.0) {
        let bs = sturmian(golden(), 30).unwrap();
        let BaseSystem::Sturmian(st) = &bs else { unreachable!() };
        let w = st.word(z, WordSide::Plus);
        let s0 = st.symbols(&w);
        let s1 = st.symbols(&st.shift(&w));
        prop_assert_eq!(&s1[..29], &s0[1..]);
    }
}

#[test]
fn exactly_one_point_has_two_preimages() {
    let dc = DoubledCantor::with_default_center(12).unwrap();
    let bs = BaseSystem::Doubled(dc.clone());
    let mut points = std::collections::HashSet::new();
    for bits in 0..(1u64 << 12) {
        for side in [Side::Plus, Side::Minus] {
            points.insert(dc.point(TernaryCode::new(bits, 12), side));
        }
    }
    let two: Vec<_> = points
        .iter()
        .map(|&code| BasePoint::DoubledCode { code })
        .filter(|x| bs.preimage_count(x).unwrap() == 2)
        .collect();
    assert_eq!(two.len(), 1, "{two:?}");
    assert_eq!(two[0], BasePoint::DoubledCode { code: dc.a() });
}
