//! Property tests over randomized inputs: structural invariants that must
//! hold for every argument combination, not just the worked examples.

use proptest::prelude::*;

use torsion_core::cone::ConeIndices;
use torsion_core::green::{cone_distance, flavor_h, ConePoint, KernelFlavor};
use torsion_core::heat::orbifold_image_kernel;
use torsion_core::spectrum::{circle_quotient_spectrum, parse_spectrum, spectrum_to_string, validate_spectrum};

proptest! {
    #[test]
    fn cone_index_identities(m in 1usize..6, i in 0usize..6, mu in 0.0f64..400.0) {
        prop_assume!(i <= m);
        let c = ConeIndices::new(m, i, mu).unwrap();
        prop_assert!((c.a_plus + c.a_minus - 2.0 * c.alpha).abs() < 1e-12);
        prop_assert!((c.a_plus - c.a_minus - 2.0 * c.nu).abs() < 1e-12);
        prop_assert!((c.a_plus * c.a_minus + mu).abs() < 1e-9 * (1.0 + mu));
        prop_assert!(c.nu >= 0.0);
    }

    #[test]
    fn kernel_symmetry_everywhere(
        m in 1usize..4,
        i in 0usize..4,
        mu in 0.0f64..60.0,
        r1 in 0.01f64..1.0,
        r2 in 0.01f64..1.0,
    ) {
        prop_assume!(i <= m);
        let c = ConeIndices::new(m, i, mu).unwrap();
        for flavor in [KernelFlavor::Model, KernelFlavor::Absolute, KernelFlavor::Relative] {
            if flavor == KernelFlavor::Absolute && c.a_plus == 0.0 && c.m == 1 {
                continue;
            }
            let a = flavor_h(&c, flavor, r1, r2).unwrap();
            let b = flavor_h(&c, flavor, r2, r1).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a.is_finite());
        }
    }

    #[test]
    fn spectrum_round_trip(k in 1u64..8, cutoff in 1.0f64..400.0) {
        let s = circle_quotient_spectrum(k, cutoff).unwrap();
        let back = parse_spectrum(&spectrum_to_string(&s)).unwrap();
        prop_assert_eq!(&s, &back);
        prop_assert!(validate_spectrum(&s).is_empty());
    }

    #[test]
    fn image_kernel_symmetric_and_positive(
        k in 1u64..8,
        t in 0.01f64..2.0,
        r1 in 0.05f64..2.0,
        r2 in 0.05f64..2.0,
        th1 in 0.0f64..0.7,
        th2 in 0.0f64..0.7,
    ) {
        let period = 2.0 * std::f64::consts::PI / k as f64;
        let x1 = ConePoint::new(r1, th1 % period);
        let x2 = ConePoint::new(r2, th2 % period);
        let a = orbifold_image_kernel(k, t, x1, x2);
        let b = orbifold_image_kernel(k, t, x2, x1);
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a);
        // never exceeds k images of the on-diagonal free kernel
        prop_assert!(a <= k as f64 / (4.0 * std::f64::consts::PI * t) + 1e-12);
    }

    #[test]
    fn cone_distance_is_a_metric_sample(
        k in 1u64..8,
        r1 in 0.05f64..1.0,
        r2 in 0.05f64..1.0,
        r3 in 0.05f64..1.0,
        a1 in 0.0f64..1.0,
        a2 in 0.0f64..1.0,
        a3 in 0.0f64..1.0,
    ) {
        let period = 2.0 * std::f64::consts::PI / k as f64;
        let x = ConePoint::new(r1, a1 * period);
        let y = ConePoint::new(r2, a2 * period);
        let z = ConePoint::new(r3, a3 * period);
        let dxy = cone_distance(k, x, y);
        let dyx = cone_distance(k, y, x);
        prop_assert!((dxy - dyx).abs() < 1e-12);
        prop_assert!(cone_distance(k, x, x) < 1e-12);
        // triangle inequality with rounding slack
        prop_assert!(dxy <= cone_distance(k, x, z) + cone_distance(k, z, y) + 1e-9);
    }
}
