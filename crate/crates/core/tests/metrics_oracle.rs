mod oracles;

use oracles::{brute_silhouette, rng, uniform_matrix, z_panel};
use physio_core::{adjusted_rand_index, silhouette_score};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn silhouette_matches_definition() {
    let mut r = rng(5);
    for _ in 0..100 {
        let n = r.random_range(3..=12);
        let k = r.random_range(2..n);
        // Every label occurs at least once.
        let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { r.random_range(0..k) }).collect();
        labels.reverse();
        let b = r.random_range(1..4);
        let z = uniform_matrix(&mut r, n, b, 2.0);
        let fast = silhouette_score(&z_panel(z.clone()), &labels).unwrap();
        let slow = brute_silhouette(&z, &labels);
        assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
    }
}

proptest! {
    #[test]
    fn ari_is_symmetric_and_label_blind(a in prop::collection::vec(0usize..4, 2..40), shift in 1usize..4) {
        let b: Vec<usize> = a.iter().rev().copied().collect();
        let ab = adjusted_rand_index(&a, &b).unwrap();
        let ba = adjusted_rand_index(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        let relabelled: Vec<usize> = a.iter().map(|&x| (x + shift) % 4).collect();
        prop_assert!((adjusted_rand_index(&a, &relabelled).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(ab <= 1.0 + 1e-12);
    }
}
