//! A deterministic corpus of fixture maps for tests and the corpus
//! generator binary.
//!
//! Every fixture is reproducible: the random families are seeded per
//! fixture, so `corpus()` returns byte-identical maps on every call. The
//! families cover strictly triangular maps (the easy passing case),
//! permutation conjugates and compositions of elementary maps (passing but
//! not triangular as written), triangular maps with a nilpotent linear
//! part (for the reduction path), known failing maps with pinned witnesses,
//! a map whose linear part is not nilpotent, and a few hand-picked maps
//! used throughout the test suite.

use crate::map::PolyMap;
use crate::poly::{Monomial, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Rat = BigRational;
type RatPoly = Polynomial<Rat>;
type RatMap = PolyMap<Rat>;

/// One named map plus what the Jacobian test is expected to say about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub family: &'static str,
    pub expected_keller: bool,
    pub map: RatMap,
}

fn q(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

fn coefficient_pool() -> Vec<Rat> {
    let mut pool: Vec<Rat> = [1, -1, 2, -2, 3, -3].iter().map(|&c| q(c)).collect();
    pool.push(BigRational::new(BigInt::from(1), BigInt::from(2)));
    pool.push(BigRational::new(BigInt::from(-1), BigInt::from(2)));
    pool
}

fn poly(dim: usize, terms: &[(i64, &[usize])]) -> RatPoly {
    RatPoly::from_terms(
        dim,
        terms.iter().map(|(c, e)| (Monomial(e.to_vec()), q(*c))),
    )
}

/// Random monomial of the given degree in variables `lo..dim`.
fn random_monomial(rng: &mut ChaCha8Rng, dim: usize, lo: usize, degree: usize) -> Monomial {
    let mut exps = vec![0usize; dim];
    for _ in 0..degree {
        exps[rng.random_range(lo..dim)] += 1;
    }
    Monomial(exps)
}

/// Strictly triangular map: component `i` only uses variables after `i`,
/// every term has degree at least 2.
fn random_triangular(n: usize, d: usize, seed: u64) -> RatMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = coefficient_pool();
    let components = (0..n)
        .map(|i| {
            if i + 1 == n {
                return RatPoly::zero(n);
            }
            let terms = (0..rng.random_range(1..=3usize)).map(|_| {
                let degree = rng.random_range(2..=d);
                let coeff = pool[rng.random_range(0..pool.len())].clone();
                (random_monomial(&mut rng, n, i + 1, degree), coeff)
            });
            RatPoly::from_terms(n, terms.collect::<Vec<_>>())
        })
        .collect();
    PolyMap::with_degree(components, d).expect("random triangular map is valid")
}

/// Strictly triangular map whose components also carry linear terms, so the
/// linear part is nilpotent by construction.
fn random_linear_triangular(n: usize, seed: u64) -> RatMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 2;
    let components = (0..n)
        .map(|i| {
            if i + 1 == n {
                return RatPoly::zero(n);
            }
            let linear_coeff = q([1, -1, 2, -2][rng.random_range(0..4)]);
            let mut terms = vec![(random_monomial(&mut rng, n, i + 1, 1), linear_coeff)];
            if rng.random_range(0..3) > 0 {
                let coeff = q([1, -1, 2, -2, 3, -3][rng.random_range(0..6)]);
                terms.push((random_monomial(&mut rng, n, i + 1, 2), coeff));
            }
            RatPoly::from_terms(n, terms)
        })
        .collect();
    PolyMap::with_degree(components, d).expect("random linear triangular map is valid")
}

/// The map `x - U(x)` obtained by composing `x - V(x)` after `x - W(x)`:
/// `U = W + V(x - W(x))`. Composing maps that pass the Jacobian test gives
/// another passing map, which is how the non-triangular passing fixtures
/// are built.
pub fn compose_maps(v: &RatMap, w: &RatMap) -> RatMap {
    assert_eq!(v.n(), w.n(), "composition needs equal dimensions");
    let n = v.n();
    let substituted: Vec<RatPoly> = (0..n)
        .map(|i| &RatPoly::variable(n, i) - w.component(i))
        .collect();
    let components = (0..n)
        .map(|i| w.component(i) + &v.component(i).compose(&substituted, None))
        .collect();
    PolyMap::new(components).expect("composition of valid maps is valid")
}

/// Elementary map: `V = coeff * monomial` in a single component, with the
/// monomial not involving that component's variable.
fn elementary(n: usize, target: usize, exps: &[usize], coeff: i64) -> RatMap {
    assert_eq!(exps[target], 0, "elementary monomial must avoid its target");
    let components = (0..n)
        .map(|i| {
            if i == target {
                RatPoly::from_terms(n, [(Monomial(exps.to_vec()), q(coeff))])
            } else {
                RatPoly::zero(n)
            }
        })
        .collect();
    PolyMap::new(components).expect("elementary map is valid")
}

fn composed_fixtures() -> Vec<(String, RatMap)> {
    let pairs: Vec<(&str, RatMap, RatMap)> = vec![
        (
            "comp_n3_a",
            elementary(3, 1, &[1, 0, 1], 1),
            elementary(3, 0, &[0, 2, 0], 1),
        ),
        (
            "comp_n3_b",
            elementary(3, 0, &[0, 1, 1], 2),
            elementary(3, 1, &[0, 0, 2], 1),
        ),
        (
            "comp_n3_c",
            elementary(3, 2, &[1, 1, 0], 1),
            elementary(3, 0, &[0, 2, 0], -1),
        ),
        (
            "comp_n4_a",
            elementary(4, 1, &[1, 0, 0, 1], 1),
            elementary(4, 0, &[0, 1, 1, 0], 1),
        ),
        (
            "comp_n4_b",
            elementary(4, 3, &[1, 0, 1, 0], 1),
            elementary(4, 2, &[0, 1, 0, 1], 1),
        ),
        (
            "comp_n4_c",
            elementary(4, 0, &[0, 1, 0, 1], 1),
            elementary(4, 1, &[1, 0, 1, 0], -1),
        ),
    ];
    pairs
        .into_iter()
        .map(|(name, v, w)| (name.to_string(), compose_maps(&v, &w)))
        .collect()
}

/// The full corpus, in a stable order.
pub fn corpus() -> Vec<Fixture> {
    let mut fixtures = Vec::new();
    let mut push = |name: String, family: &'static str, expected_keller: bool, map: RatMap| {
        fixtures.push(Fixture {
            name,
            family,
            expected_keller,
            map,
        });
    };

    for n in [2usize, 3, 4] {
        for d in [2usize, 3] {
            for s in 0..8u64 {
                let seed = (n as u64) * 1_000 + (d as u64) * 100 + s;
                push(
                    format!("tri_n{n}_d{d}_s{s}"),
                    "triangular",
                    true,
                    random_triangular(n, d, seed),
                );
            }
        }
    }

    // rotate the variables of a few triangular maps; the verdict must not
    // care about variable order
    for (n, d, s) in [(3, 2, 0u64), (3, 2, 1), (3, 3, 0), (4, 2, 0), (4, 3, 0), (4, 3, 1)] {
        let base = random_triangular(n, d, (n as u64) * 1_000 + (d as u64) * 100 + s);
        let sigma: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        push(
            format!("perm_n{n}_d{d}_s{s}"),
            "permuted",
            true,
            base.conjugate_by_permutation(&sigma),
        );
    }

    for (name, map) in composed_fixtures() {
        push(name, "composed", true, map);
    }

    for n in [2usize, 3, 4] {
        for s in 0..4u64 {
            push(
                format!("lin_n{n}_s{s}"),
                "linear_triangular",
                true,
                random_linear_triangular(n, 7_000 + (n as u64) * 100 + s),
            );
        }
    }

    push(
        "nonkeller_n2".to_string(),
        "non_keller",
        false,
        PolyMap::new(vec![poly(2, &[(1, &[2, 0])]), RatPoly::zero(2)]).unwrap(),
    );
    push(
        "catalan_n1".to_string(),
        "non_keller",
        false,
        PolyMap::new(vec![poly(1, &[(1, &[2])])]).unwrap(),
    );
    push(
        "linpart_bad".to_string(),
        "non_nilpotent",
        false,
        PolyMap::new(vec![poly(2, &[(1, &[1, 0])]), RatPoly::zero(2)]).unwrap(),
    );

    push(
        "shear_n2".to_string(),
        "special",
        true,
        PolyMap::new(vec![poly(2, &[(1, &[0, 2])]), RatPoly::zero(2)]).unwrap(),
    );
    push(
        "chain_n3".to_string(),
        "special",
        true,
        PolyMap::new(vec![
            poly(3, &[(1, &[0, 1, 1])]),
            poly(3, &[(1, &[0, 0, 2])]),
            RatPoly::zero(3),
        ])
        .unwrap(),
    );
    // swap compositions: passing maps whose level filter genuinely bites
    push(
        "swap_a".to_string(),
        "special",
        true,
        compose_maps(
            &elementary(2, 1, &[2, 0], 1),
            &elementary(2, 0, &[0, 2], 1),
        ),
    );
    push(
        "swap_b".to_string(),
        "special",
        true,
        compose_maps(
            &elementary(2, 0, &[0, 2], 1),
            &elementary(2, 1, &[2, 0], 1),
        ),
    );

    fixtures
}
