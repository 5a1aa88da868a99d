use std::sync::Arc;

use proptest::prelude::*;
use sigmarho::modring::{choose_prime, PrimeField};
use sigmarho::posets::{
    cover_convolution, covering_product, zeta_chain, zeta_product_order, CoordOrder, FlatOrder,
};
use sigmarho::transforms::{Dim, Direction, Tensor};

fn field() -> Arc<PrimeField> {
    let p = choose_prime(&[64], 1 << 61).unwrap();
    Arc::new(PrimeField::new(p, &[64]).unwrap())
}

fn cells(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut i| {
            let mut idx = vec![0; sizes.len()];
            for d in (0..sizes.len()).rev() {
                idx[d] = i % sizes[d];
                i /= sizes[d];
            }
            idx
        })
        .collect()
}

/// Zeta transform by definition: sum of f over everything below x in the product order.
fn brute_zeta(t: &Tensor, order: CoordOrder) -> Vec<u64> {
    let all = cells(&t.sizes());
    all.iter()
        .map(|x| {
            all.iter()
                .filter(|y| y.iter().zip(x.iter()).all(|(&a, &b)| order.leq(a, b)))
                .fold(0, |acc, y| t.field.add(acc, t.get(y)))
        })
        .collect()
}

fn orders() -> Vec<CoordOrder> {
    vec![
        CoordOrder::Chain(2),
        CoordOrder::Chain(3),
        CoordOrder::Flat(FlatOrder::tds_pairs()),
        CoordOrder::Flat(FlatOrder { sigma_low: 2, sigma_top: true, rho_low: 1, rho_top: false }),
        CoordOrder::Flat(FlatOrder { sigma_low: 0, sigma_top: true, rho_low: 2, rho_top: true }),
    ]
}

#[test]
fn flat_order_sums_lows_into_top() {
    let order = CoordOrder::Flat(FlatOrder { sigma_low: 2, sigma_top: true, rho_low: 1, rho_top: false });
    let t = Tensor::from_data(field(), vec![Dim::cyclic(4)], vec![1, 1, 1, 1]).unwrap();
    let z = zeta_product_order(&t, order, Direction::Forward).unwrap();
    assert_eq!(z.data, vec![1, 1, 3, 1]);
}

#[test]
fn wrong_dimension_size_is_rejected() {
    let t = Tensor::zeros(field(), vec![Dim::cyclic(3)]);
    assert!(zeta_product_order(&t, CoordOrder::Chain(2), Direction::Forward).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zeta_matches_definition_and_inverts(which in 0usize..5, k in 1usize..4, seed in any::<u64>()) {
        let order = orders()[which];
        let n = order.size();
        let f = field();
        let total = n.pow(k as u32);
        let data: Vec<u64> = (0..total as u64).map(|i| (seed.wrapping_mul(i + 7) >> 3) % f.modulus()).collect();
        let t = Tensor::from_data(f, vec![Dim::cyclic(n); k], data).unwrap();
        let z = zeta_product_order(&t, order, Direction::Forward).unwrap();
        prop_assert_eq!(&z.data, &brute_zeta(&t, order));
        let back = zeta_product_order(&z, order, Direction::Inverse).unwrap();
        prop_assert_eq!(back.data, t.data);
    }

    #[test]
    fn chain_zeta_is_prefix_sum(a in prop::collection::vec(0u64..1000, 1..8), b in prop::collection::vec(0u64..1000, 1..5)) {
        let f = field();
        let data: Vec<u64> = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
        let t = Tensor::from_data(f, vec![Dim::linear(a.len()), Dim::linear(b.len())], data).unwrap();
        let z = zeta_chain(&t, Direction::Forward);
        for i in 0..a.len() {
            for j in 0..b.len() {
                let expect: u64 = a[..=i].iter().sum::<u64>() * b[..=j].iter().sum::<u64>();
                prop_assert_eq!(z.get(&[i, j]), expect);
            }
        }
        prop_assert_eq!(zeta_chain(&z, Direction::Inverse).data, t.data);
    }

    #[test]
    fn covering_product_over_chains(r in 2usize..4, k in 1usize..4, seed in any::<u64>()) {
        let f = field();
        let total = r.pow(k as u32);
        let gen = |salt: u64| -> Vec<u64> {
            (0..total as u64).map(|i| (seed ^ salt).wrapping_mul(i * 2 + 1) % 1000).collect()
        };
        let a = Tensor::from_data(f.clone(), vec![Dim::cyclic(r); k], gen(1)).unwrap();
        let b = Tensor::from_data(f.clone(), vec![Dim::cyclic(r); k], gen(2)).unwrap();
        let h = covering_product(&a, &b, CoordOrder::Chain(r)).unwrap();
        let all = cells(&vec![r; k]);
        let mut expect = vec![0u64; total];
        for x in &all {
            for y in &all {
                let join: Vec<usize> = x.iter().zip(y).map(|(&p, &q)| p.max(q)).collect();
                expect[a.offset(&join)] += a.get(x) * b.get(y);
            }
        }
        prop_assert_eq!(h.data, expect);
    }

    #[test]
    fn cover_convolution_mixes_join_and_sum(k in 1usize..3, q in 1usize..5, seed in any::<u64>()) {
        let f = field();
        let mut dims = vec![Dim::cyclic(2); k];
        dims.push(Dim::linear(q));
        let total = (1usize << k) * q;
        let gen = |salt: u64| -> Vec<u64> {
            (0..total as u64).map(|i| (seed ^ salt).wrapping_mul(i + 3) % 100).collect()
        };
        let a = Tensor::from_data(f.clone(), dims.clone(), gen(5)).unwrap();
        let b = Tensor::from_data(f.clone(), dims.clone(), gen(9)).unwrap();
        let axes: Vec<usize> = (0..k).collect();
        let h = cover_convolution(&a, &b, CoordOrder::Chain(2), &axes).unwrap();
        let mut sizes = vec![2; k];
        sizes.push(q);
        let all = cells(&sizes);
        let mut expect = vec![0u64; total];
        for x in &all {
            for y in &all {
                if x[k] + y[k] >= q {
                    continue;
                }
                let mut z: Vec<usize> = x[..k].iter().zip(&y[..k]).map(|(&p, &r)| p.max(r)).collect();
                z.push(x[k] + y[k]);
                expect[a.offset(&z)] += a.get(x) * b.get(y);
            }
        }
        prop_assert_eq!(h.data, expect);
    }
}
