//! Valuations and their calculus: modularity/monotonicity checks, the
//! distance `d(a, b) = φ(a ∨ b) − φ(a ∧ b)`, the equivalence `a ≈ b`
//! (`d(a, b) = 0`), quotients of finite systems, and the opposite, product
//! and composite valuations.
//!
//! Construction never verifies the valuation axioms. [`check_valuation`]
//! does, on seeded samples, so deliberately broken maps can be built and
//! used as negative controls.

use std::borrow::Cow;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{FiniteLattice, Lattice, LatticeError, Opposite, Product};
use crate::oag::{Op, OrderedGroup};
use crate::report::CheckReport;

pub use crate::report::PropertyTally;

/// Element type of a valuation's domain.
pub type Elem<P> = <<P as Valuation>::L as Lattice>::Elem;

/// A map from a lattice into an ordered Abelian group.
pub trait Valuation {
    type L: Lattice;
    type V: OrderedGroup;

    fn lattice(&self) -> &Self::L;
    fn eval(&self, a: &Elem<Self>) -> Self::V;

    fn name(&self) -> Cow<'_, str> {
        Cow::Borrowed(std::any::type_name::<Self>())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValuationError {
    #[error("the domain has no random element generator")]
    NoGenerator,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("quotient is ill defined: {0}")]
    IllDefined(String),
}

/// A valuation given by a closure, used for ad-hoc maps and negative controls.
pub struct FnValuation<L, V, F> {
    lattice: L,
    f: F,
    name: String,
    _v: std::marker::PhantomData<fn() -> V>,
}

impl<L, V, F> FnValuation<L, V, F>
where
    L: Lattice,
    V: OrderedGroup,
    F: Fn(&L::Elem) -> V,
{
    pub fn new(name: impl Into<String>, lattice: L, f: F) -> Self {
        FnValuation {
            lattice,
            f,
            name: name.into(),
            _v: std::marker::PhantomData,
        }
    }
}

impl<L, V, F> Valuation for FnValuation<L, V, F>
where
    L: Lattice,
    V: OrderedGroup,
    F: Fn(&L::Elem) -> V,
{
    type L = L;
    type V = V;

    fn lattice(&self) -> &L {
        &self.lattice
    }
    fn eval(&self, a: &L::Elem) -> V {
        (self.f)(a)
    }
    fn name(&self) -> Cow<'_, str> {
        Cow::Borrowed(&self.name)
    }
}

/// A valuation on a finite lattice given by a value table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableValuation<V> {
    pub lattice: FiniteLattice,
    pub values: Vec<V>,
}

impl<V: OrderedGroup> TableValuation<V> {
    pub fn new(lattice: FiniteLattice, values: Vec<V>) -> Self {
        assert_eq!(lattice.len(), values.len(), "one value per element");
        TableValuation { lattice, values }
    }
}

impl<V: OrderedGroup> Valuation for TableValuation<V> {
    type L = FiniteLattice;
    type V = V;

    fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }
    fn eval(&self, a: &usize) -> V {
        self.values[*a].clone()
    }
    fn name(&self) -> Cow<'_, str> {
        Cow::Borrowed("table")
    }
}

/// `φ` viewed as a map `L^op → E^op`.
pub struct OppositeValuation<P: Valuation> {
    inner: P,
    lattice: Opposite<P::L>,
}

impl<P: Valuation> OppositeValuation<P>
where
    P::L: Clone,
{
    pub fn new(inner: P) -> Self {
        let lattice = Opposite(inner.lattice().clone());
        OppositeValuation { inner, lattice }
    }
}

impl<P: Valuation> Valuation for OppositeValuation<P> {
    type L = Opposite<P::L>;
    type V = Op<P::V>;

    fn lattice(&self) -> &Self::L {
        &self.lattice
    }
    fn eval(&self, a: &Elem<P>) -> Op<P::V> {
        Op(self.inner.eval(a))
    }
    fn name(&self) -> Cow<'_, str> {
        Cow::Owned(format!("opposite({})", self.inner.name()))
    }
}

/// `φ × ψ` on the product lattice, into the product group.
pub struct ProductValuation<P: Valuation, Q: Valuation> {
    left: P,
    right: Q,
    lattice: Product<P::L, Q::L>,
}

impl<P: Valuation, Q: Valuation> ProductValuation<P, Q>
where
    P::L: Clone,
    Q::L: Clone,
{
    pub fn new(left: P, right: Q) -> Self {
        let lattice = Product(left.lattice().clone(), right.lattice().clone());
        ProductValuation {
            left,
            right,
            lattice,
        }
    }
}

impl<P: Valuation, Q: Valuation> Valuation for ProductValuation<P, Q> {
    type L = Product<P::L, Q::L>;
    type V = (P::V, Q::V);

    fn lattice(&self) -> &Self::L {
        &self.lattice
    }
    fn eval(&self, a: &(Elem<P>, Elem<Q>)) -> (P::V, Q::V) {
        (self.left.eval(&a.0), self.right.eval(&a.1))
    }
    fn name(&self) -> Cow<'_, str> {
        Cow::Owned(format!("{} × {}", self.left.name(), self.right.name()))
    }
}

/// `g ∘ φ ∘ f` for a lattice homomorphism `f: L' → L` and a group
/// homomorphism `g: E → E'`. Modular whenever `φ` is; a valuation when in
/// addition `g` is positive.
pub struct Composed<P, L2, F, G, W> {
    inner: P,
    domain: L2,
    f: F,
    g: G,
    _w: std::marker::PhantomData<fn() -> W>,
}

impl<P, L2, F, G, W> Composed<P, L2, F, G, W>
where
    P: Valuation,
    L2: Lattice,
    W: OrderedGroup,
    F: Fn(&L2::Elem) -> Elem<P>,
    G: Fn(&P::V) -> W,
{
    pub fn new(g: G, inner: P, domain: L2, f: F) -> Self {
        Composed {
            inner,
            domain,
            f,
            g,
            _w: std::marker::PhantomData,
        }
    }
}

impl<P, L2, F, G, W> Valuation for Composed<P, L2, F, G, W>
where
    P: Valuation,
    L2: Lattice,
    W: OrderedGroup,
    F: Fn(&L2::Elem) -> Elem<P>,
    G: Fn(&P::V) -> W,
{
    type L = L2;
    type V = W;

    fn lattice(&self) -> &L2 {
        &self.domain
    }
    fn eval(&self, a: &L2::Elem) -> W {
        (self.g)(&self.inner.eval(&(self.f)(a)))
    }
    fn name(&self) -> Cow<'_, str> {
        Cow::Owned(format!("g∘{}∘f", self.inner.name()))
    }
}

fn sample<P: Valuation>(phi: &P, rng: &mut dyn RngCore) -> Result<Elem<P>, ValuationError> {
    phi.lattice().sample(rng).ok_or(ValuationError::NoGenerator)
}

fn check_member<P: Valuation>(phi: &P, a: &Elem<P>) -> Result<(), ValuationError> {
    if phi.lattice().contains(a) {
        Ok(())
    } else {
        Err(LatticeError::ForeignElement(format!("{a:?}")).into())
    }
}

/// `d(a, b) = φ(a ∨ b) − φ(a ∧ b)`.
pub fn dist<P: Valuation>(phi: &P, a: &Elem<P>, b: &Elem<P>) -> Result<P::V, ValuationError> {
    check_member(phi, a)?;
    check_member(phi, b)?;
    Ok(dist_unchecked(phi, a, b))
}

pub(crate) fn dist_unchecked<P: Valuation>(phi: &P, a: &Elem<P>, b: &Elem<P>) -> P::V {
    let l = phi.lattice();
    phi.eval(&l.join(a, b)).sub(&phi.eval(&l.meet(a, b)))
}

/// `a ≈ b` iff `d(a, b)` is the group zero.
pub fn approx_equal<P: Valuation>(phi: &P, a: &Elem<P>, b: &Elem<P>) -> Result<bool, ValuationError> {
    Ok(dist(phi, a, b)?.is_zero())
}

fn modular_ok<P: Valuation>(phi: &P, a: &Elem<P>, b: &Elem<P>) -> bool {
    let l = phi.lattice();
    phi.eval(&l.meet(a, b)).add(&phi.eval(&l.join(a, b))) == phi.eval(a).add(&phi.eval(b))
}

fn monotone_ok<P: Valuation>(phi: &P, a: &Elem<P>, b: &Elem<P>) -> bool {
    let l = phi.lattice();
    let (m, j) = (l.meet(a, b), l.join(a, b));
    let (vm, va, vj) = (phi.eval(&m), phi.eval(a), phi.eval(&j));
    vm.leq(&va) && va.leq(&vj)
}

/// Samples `samples` pairs and tallies modularity and monotonicity.
///
/// Monotonicity is tested on the comparable chain `a ∧ b ≤ a ≤ a ∨ b`.
pub fn check_valuation<P: Valuation>(
    phi: &P,
    samples: u64,
    seed: u64,
) -> Result<CheckReport, ValuationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    for _ in 0..samples {
        let a = sample(phi, &mut rng)?;
        let b = sample(phi, &mut rng)?;
        let wit = || witness2(phi, &a, &b);
        report.record("modularity", modular_ok(phi, &a, &b), wit);
        report.record("monotonicity", monotone_ok(phi, &a, &b), wit);
    }
    Ok(report)
}

/// Exhaustive modularity and monotonicity over a finite domain.
pub fn check_valuation_exhaustive<P>(phi: &P) -> CheckReport
where
    P: Valuation<L = FiniteLattice>,
{
    let mut report = CheckReport::new();
    let l = phi.lattice();
    for a in l.elements() {
        for b in l.elements() {
            let wit = || witness2(phi, &a, &b);
            report.record("modularity", modular_ok(phi, &a, &b), wit);
            report.record("monotonicity", monotone_ok(phi, &a, &b), wit);
        }
    }
    report
}

fn witness2<P: Valuation>(phi: &P, a: &Elem<P>, b: &Elem<P>) -> String {
    let l = phi.lattice();
    format!(
        "a={a:?}, b={b:?}, φ(a)={:?}, φ(b)={:?}, φ(a∧b)={:?}, φ(a∨b)={:?}",
        phi.eval(a),
        phi.eval(b),
        phi.eval(&l.meet(a, b)),
        phi.eval(&l.join(a, b))
    )
}

/// Non-negativity, zero diagonal, symmetry and the triangle inequality of `d`.
pub fn check_pseudometric<P: Valuation>(
    phi: &P,
    samples: u64,
    seed: u64,
) -> Result<CheckReport, ValuationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    let zero = P::V::zero();
    for _ in 0..samples {
        let a = sample(phi, &mut rng)?;
        let b = sample(phi, &mut rng)?;
        let z = sample(phi, &mut rng)?;
        let dab = dist_unchecked(phi, &a, &b);
        let wit = || format!("a={a:?}, b={b:?}, z={z:?}");
        report.record("nonnegative", zero.leq(&dab), wit);
        report.record("zero_diagonal", dist_unchecked(phi, &a, &a).is_zero(), wit);
        report.record("symmetric", dab == dist_unchecked(phi, &b, &a), wit);
        let via = dist_unchecked(phi, &a, &z).add(&dist_unchecked(phi, &z, &b));
        report.record("triangle", dab.leq(&via), wit);
    }
    Ok(report)
}

/// `d(a∧z, b∧z) + d(a∨z, b∨z) ≤ d(a, b)` on sampled triples.
pub fn check_contraction<P: Valuation>(
    phi: &P,
    samples: u64,
    seed: u64,
) -> Result<CheckReport, ValuationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    let l = phi.lattice();
    for _ in 0..samples {
        let a = sample(phi, &mut rng)?;
        let b = sample(phi, &mut rng)?;
        let z = sample(phi, &mut rng)?;
        let lhs = dist_unchecked(phi, &l.meet(&a, &z), &l.meet(&b, &z))
            .add(&dist_unchecked(phi, &l.join(&a, &z), &l.join(&b, &z)));
        report.record(
            "contraction",
            lhs.leq(&dist_unchecked(phi, &a, &b)),
            || format!("a={a:?}, b={b:?}, z={z:?}"),
        );
    }
    Ok(report)
}

/// `d(a∧w, b∧z) + d(a∨w, b∨z) ≤ d(a, b) + d(w, z)` on sampled quadruples.
pub fn check_joint_contraction<P: Valuation>(
    phi: &P,
    samples: u64,
    seed: u64,
) -> Result<CheckReport, ValuationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    let l = phi.lattice();
    for _ in 0..samples {
        let a = sample(phi, &mut rng)?;
        let b = sample(phi, &mut rng)?;
        let w = sample(phi, &mut rng)?;
        let z = sample(phi, &mut rng)?;
        let lhs = dist_unchecked(phi, &l.meet(&a, &w), &l.meet(&b, &z))
            .add(&dist_unchecked(phi, &l.join(&a, &w), &l.join(&b, &z)));
        let rhs = dist_unchecked(phi, &a, &b).add(&dist_unchecked(phi, &w, &z));
        report.record("joint_contraction", lhs.leq(&rhs), || {
            format!("a={a:?}, b={b:?}, w={w:?}, z={z:?}")
        });
    }
    Ok(report)
}

/// `≈` is a congruence. `variant` must return an element `≈`-equivalent to
/// its input (e.g. by adding a null set); the check confirms that and then
/// that meets, joins, values and distances are preserved.
pub fn check_congruence<P, F>(
    phi: &P,
    variant: F,
    samples: u64,
    seed: u64,
) -> Result<CheckReport, ValuationError>
where
    P: Valuation,
    F: Fn(&Elem<P>, &mut dyn RngCore) -> Elem<P>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    let l = phi.lattice();
    for _ in 0..samples {
        let a1 = sample(phi, &mut rng)?;
        let b1 = sample(phi, &mut rng)?;
        let a2 = variant(&a1, &mut rng);
        let b2 = variant(&b1, &mut rng);
        let wit = || format!("a1={a1:?}, a2={a2:?}, b1={b1:?}, b2={b2:?}");
        let equiv = |x: &Elem<P>, y: &Elem<P>| dist_unchecked(phi, x, y).is_zero();
        report.record("variant_equivalent", equiv(&a1, &a2) && equiv(&b1, &b2), wit);
        report.record(
            "meet_preserved",
            equiv(&l.meet(&a1, &b1), &l.meet(&a2, &b2)),
            wit,
        );
        report.record(
            "join_preserved",
            equiv(&l.join(&a1, &b1), &l.join(&a2, &b2)),
            wit,
        );
        report.record("value_preserved", phi.eval(&a1) == phi.eval(&a2), wit);
        report.record(
            "distance_preserved",
            dist_unchecked(phi, &a1, &b1) == dist_unchecked(phi, &a2, &b2),
            wit,
        );
    }
    Ok(report)
}

/// For `ℓ ≤ u`: `φ(ℓ ∨ (a ∧ u)) = φ((ℓ ∨ a) ∧ u)`. Sampled `ℓ, u` are
/// replaced by `ℓ ∧ u, ℓ ∨ u` so the hypothesis always holds.
pub fn check_modular_map_identity<P: Valuation>(
    phi: &P,
    samples: u64,
    seed: u64,
) -> Result<CheckReport, ValuationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    let l = phi.lattice();
    for _ in 0..samples {
        let x = sample(phi, &mut rng)?;
        let y = sample(phi, &mut rng)?;
        let a = sample(phi, &mut rng)?;
        let (lo, hi) = (l.meet(&x, &y), l.join(&x, &y));
        let lhs = phi.eval(&l.join(&lo, &l.meet(&a, &hi)));
        let rhs = phi.eval(&l.meet(&l.join(&lo, &a), &hi));
        report.record("modular_map_identity", lhs == rhs, || {
            format!("l={lo:?}, u={hi:?}, a={a:?}")
        });
    }
    Ok(report)
}

/// A finite system modulo `≈`.
#[derive(Debug, Clone)]
pub struct Quotient<V> {
    pub lattice: FiniteLattice,
    pub valuation: TableValuation<V>,
    /// Class index of each element of the original lattice.
    pub class_of: Vec<usize>,
}

/// Collapses a valuation on a finite lattice by `≈`.
///
/// Fails with [`ValuationError::IllDefined`] when the induced meet, join or
/// value would depend on the representative, which only happens for inputs
/// that are not valuations.
pub fn quotient<P>(phi: &P) -> Result<Quotient<P::V>, ValuationError>
where
    P: Valuation<L = FiniteLattice>,
{
    let l = phi.lattice();
    let n = l.len();
    let equiv = |a: usize, b: usize| dist_unchecked(phi, &a, &b).is_zero();

    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = vec![usize::MAX; n];
    for a in l.elements() {
        let matches: Vec<usize> = (0..reps.len()).filter(|&c| equiv(reps[c], a)).collect();
        match matches.as_slice() {
            [] => {
                class_of[a] = reps.len();
                reps.push(a);
            }
            [c] => class_of[a] = *c,
            _ => {
                return Err(ValuationError::IllDefined(format!(
                    "{} is ≈ to several non-equivalent representatives",
                    l.label(a)
                )))
            }
        }
    }

    for a in l.elements() {
        let ra = reps[class_of[a]];
        if phi.eval(&a) != phi.eval(&ra) {
            return Err(ValuationError::IllDefined(format!(
                "φ differs on {} and {}",
                l.label(a),
                l.label(ra)
            )));
        }
        for b in l.elements() {
            let rb = reps[class_of[b]];
            if class_of[l.meet(&a, &b)] != class_of[l.meet(&ra, &rb)]
                || class_of[l.join(&a, &b)] != class_of[l.join(&ra, &rb)]
            {
                return Err(ValuationError::IllDefined(format!(
                    "meet/join of {}, {} depends on representatives",
                    l.label(a),
                    l.label(b)
                )));
            }
        }
    }

    let k = reps.len();
    let labels: Vec<String> = (0..k)
        .map(|c| {
            let members: Vec<&str> = l
                .elements()
                .filter(|&a| class_of[a] == c)
                .map(|a| l.label(a))
                .collect();
            format!("[{}]", members.join("|"))
        })
        .collect();
    let mut pairs = Vec::new();
    for x in 0..k {
        for y in 0..k {
            if class_of[l.meet(&reps[x], &reps[y])] == x {
                pairs.push((x, y));
            }
        }
    }
    let ql = FiniteLattice::build(labels, &pairs)?;
    for x in 0..k {
        for y in 0..k {
            if ql.meet(&x, &y) != class_of[l.meet(&reps[x], &reps[y])]
                || ql.join(&x, &y) != class_of[l.join(&reps[x], &reps[y])]
            {
                return Err(ValuationError::IllDefined(
                    "induced order does not reproduce induced meet/join".into(),
                ));
            }
        }
    }
    let values = reps.iter().map(|r| phi.eval(r)).collect();
    Ok(Quotient {
        valuation: TableValuation::new(ql.clone(), values),
        lattice: ql,
        class_of,
    })
}

/// `d(x, y) = 0 ⟹ x = y` over the whole finite domain.
pub fn is_hausdorff<P>(phi: &P) -> bool
where
    P: Valuation<L = FiniteLattice>,
{
    let l = phi.lattice();
    l.elements()
        .all(|x| l.elements().all(|y| x == y || !dist_unchecked(phi, &x, &y).is_zero()))
}

impl<V: fmt::Display> fmt::Display for TableValuation<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            writeln!(f, "{} ↦ {v}", self.lattice.label(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteLattice;
    use crate::rational::Rational;

    fn r(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn constant_zero_on_m3_collapses_to_a_point() {
        let phi = TableValuation::new(FiniteLattice::m3(), vec![r(0); 5]);
        let q = quotient(&phi).unwrap();
        assert_eq!(q.lattice.len(), 1);
        assert!(is_hausdorff(&q.valuation));
    }

    #[test]
    fn identity_on_chain_is_already_hausdorff() {
        let phi = TableValuation::new(FiniteLattice::chain(4), (0..4).map(r).collect());
        let q = quotient(&phi).unwrap();
        assert_eq!(q.lattice.len(), 4);
        assert_eq!(q.class_of, vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_block_chain_quotient() {
        let phi = TableValuation::new(FiniteLattice::chain(4), vec![r(0), r(0), r(1), r(1)]);
        let q = quotient(&phi).unwrap();
        assert_eq!(q.lattice.len(), 2);
        assert_eq!(q.class_of, vec![0, 0, 1, 1]);
        assert!(q.lattice.leq(&0, &1));
        assert_eq!(q.valuation.values, vec![r(0), r(1)]);
        assert!(check_valuation_exhaustive(&q.valuation).all_pass());
    }

    #[test]
    fn non_valuation_quotient_is_ill_defined() {
        // On M3, a ≈ 0 but b ≉ 0 and a ∨ b = 1: values picked so ≈ is not a congruence.
        let phi = TableValuation::new(FiniteLattice::m3(), vec![r(0), r(0), r(1), r(1), r(5)]);
        assert!(matches!(quotient(&phi), Err(ValuationError::IllDefined(_))));
    }

    #[test]
    fn dist_zero_on_diagonal_and_foreign_rejected() {
        let phi = TableValuation::new(FiniteLattice::chain(3), vec![r(0), r(2), r(7)]);
        assert_eq!(dist(&phi, &1, &1).unwrap(), r(0));
        assert_eq!(dist(&phi, &0, &2).unwrap(), r(7));
        assert!(matches!(
            dist(&phi, &0, &9),
            Err(ValuationError::Lattice(LatticeError::ForeignElement(_)))
        ));
    }

    #[test]
    fn no_generator_is_an_error() {
        struct Bare;
        impl Lattice for Bare {
            type Elem = u8;
            fn meet(&self, a: &u8, b: &u8) -> u8 {
                *a.min(b)
            }
            fn join(&self, a: &u8, b: &u8) -> u8 {
                *a.max(b)
            }
        }
        let phi = FnValuation::new("bare", Bare, |a: &u8| *a as i64);
        assert_eq!(
            check_valuation(&phi, 10, 0).unwrap_err(),
            ValuationError::NoGenerator
        );
    }

    #[test]
    fn opposite_and_product_of_table_valuations() {
        let chain = TableValuation::new(FiniteLattice::chain(3), vec![r(0), r(1), r(3)]);
        let op = OppositeValuation::new(chain.clone());
        assert!(check_valuation(&op, 200, 3).unwrap().all_pass());
        let pow = TableValuation::new(
            FiniteLattice::powerset(2),
            vec![0i64, 1, 1, 2],
        );
        let prod = ProductValuation::new(chain, pow);
        assert!(check_valuation(&prod, 200, 3).unwrap().all_pass());
    }
}
