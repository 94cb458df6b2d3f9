//! Finite open games in lens form.
//!
//! A game `(X,S) -> (Y,R)` has, per strategy, a short lens and an
//! equilibrium relation on contexts `(x, k : Y -> R)`. The relation is stored
//! as one subset of `X` per continuation `k`, in [`FnSpace`] order.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::lens::{compose_lens, is_short_lens, point_of, tensor_lens, LensMap, LensObject};
use crate::metric::{ball_union, ExtReal, FnSpace, FnTable, Subset};
use crate::selection::{contravariant_scan, decode_into, Check, MonoidalDirection, SelectionFunction};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenGame {
    domain: LensObject,
    codomain: LensObject,
    space: FnSpace,
    strategies: Vec<String>,
    lenses: Vec<LensMap>,
    equilibria: Vec<Vec<Subset>>,
}

impl OpenGame {
    pub fn new(
        domain: LensObject,
        codomain: LensObject,
        strategies: Vec<String>,
        lenses: Vec<LensMap>,
        equilibria: Vec<Vec<Subset>>,
    ) -> Result<Self> {
        let space = codomain.utility_space()?;
        if strategies.is_empty() {
            return Err(Error::invalid("an open game needs at least one strategy"));
        }
        if lenses.len() != strategies.len() || equilibria.len() != strategies.len() {
            return Err(Error::invalid(format!(
                "{} strategies but {} lenses and {} equilibrium tables",
                strategies.len(),
                lenses.len(),
                equilibria.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = strategies.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(Error::invalid(format!("duplicate strategy {dup}")));
        }
        let full = Subset::full(domain.fwd().len());
        for ((name, lens), eq) in strategies.iter().zip(&lenses).zip(&equilibria) {
            if lens.source() != &domain {
                return Err(Error::BoundaryMismatch { expected: domain.to_string(), found: lens.source().to_string() });
            }
            if lens.target() != &codomain {
                return Err(Error::BoundaryMismatch {
                    expected: codomain.to_string(),
                    found: lens.target().to_string(),
                });
            }
            is_short_lens(lens).map_err(Error::NotShort)?;
            if eq.len() != space.count() {
                return Err(Error::invalid(format!(
                    "strategy {name}: equilibrium has {} continuations, expected {}",
                    eq.len(),
                    space.count()
                )));
            }
            if eq.iter().any(|s| !s.is_subset(full)) {
                return Err(Error::Membership(format!("strategy {name}: equilibrium names a state outside X")));
            }
        }
        Ok(OpenGame { domain, codomain, space, strategies, lenses, equilibria })
    }

    pub fn domain(&self) -> &LensObject {
        &self.domain
    }

    pub fn codomain(&self) -> &LensObject {
        &self.codomain
    }

    /// Continuations `Y -> R`.
    pub fn space(&self) -> FnSpace {
        self.space
    }

    pub fn strategies(&self) -> &[String] {
        &self.strategies
    }

    pub fn lens(&self, sigma: usize) -> &LensMap {
        &self.lenses[sigma]
    }

    pub fn lenses(&self) -> &[LensMap] {
        &self.lenses
    }

    pub fn equilibrium(&self, sigma: usize) -> &[Subset] {
        &self.equilibria[sigma]
    }

    pub fn equilibria(&self) -> &[Vec<Subset>] {
        &self.equilibria
    }

    pub fn contains(&self, sigma: usize, x: usize, k: &FnTable) -> bool {
        self.equilibria[sigma][k.index()].contains(x)
    }

    fn with_equilibria(&self, equilibria: Vec<Vec<Subset>>) -> OpenGame {
        OpenGame { equilibria, ..self.clone() }
    }
}

/// A context `(σ, x, k)` at which a game law failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameWitness {
    pub sigma: usize,
    pub x: usize,
    pub k: FnTable,
}

impl GameWitness {
    fn at(space: FnSpace, sigma: usize, x: usize, k_index: usize) -> Self {
        GameWitness { sigma, x, k: space.table(k_index) }
    }
}

impl fmt::Display for GameWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "strategy={} x={} k={}", self.sigma, self.x, self.k)
    }
}

fn tables_leq(space: FnSpace, a: &[Vec<Subset>], b: &[Vec<Subset>]) -> Check<GameWitness> {
    for (sigma, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (k, (sa, sb)) in ra.iter().zip(rb).enumerate() {
            if let Some(x) = sa.first_outside(*sb) {
                return Err(GameWitness::at(space, sigma, x, k));
            }
        }
    }
    Ok(())
}

/// Equilibria enlarged to every continuation within `eps` of an equilibrium one.
pub fn t_eps_game(eps: ExtReal, g: &OpenGame) -> OpenGame {
    if eps == ExtReal::ZERO {
        return g.clone();
    }
    let balls = g.codomain.bwd().balls(eps);
    g.with_equilibria(g.equilibria.iter().map(|eq| ball_union(eq, g.space, &balls)).collect())
}

#[derive(Clone, Debug)]
pub struct GameMorphism<'a> {
    f: FnTable,
    alpha: LensMap,
    beta: LensMap,
    source: &'a OpenGame,
    target: &'a OpenGame,
}

impl<'a> GameMorphism<'a> {
    pub fn new(f: FnTable, alpha: LensMap, beta: LensMap, source: &'a OpenGame, target: &'a OpenGame) -> Result<Self> {
        if f.domain_len() != source.strategies.len() || f.codomain_len() != target.strategies.len() {
            return Err(Error::DomainMismatch(format!(
                "strategy map {} -> {} between games with {} and {} strategies",
                f.domain_len(),
                f.codomain_len(),
                source.strategies.len(),
                target.strategies.len()
            )));
        }
        for (lens, from, to) in [(&alpha, &source.domain, &target.domain), (&beta, &source.codomain, &target.codomain)] {
            if lens.source() != from {
                return Err(Error::BoundaryMismatch { expected: from.to_string(), found: lens.source().to_string() });
            }
            if lens.target() != to {
                return Err(Error::BoundaryMismatch { expected: to.to_string(), found: lens.target().to_string() });
            }
        }
        is_short_lens(&alpha).map_err(Error::NotShort)?;
        is_short_lens(&beta).map_err(Error::NotShort)?;
        Ok(GameMorphism { f, alpha, beta, source, target })
    }
}

/// `(∀σ, x, k : Y' -> R') αx ∈ E'_{fσ} k ⇒ x ∈ E_σ(k.β)`.
pub fn is_game_morphism(m: &GameMorphism<'_>) -> Result<Check<GameWitness>> {
    let pull = m.beta.pullback_indices()?;
    Ok(morphism_scan(m, &pull, &m.source.equilibria, &m.target.equilibria))
}

fn morphism_scan(
    m: &GameMorphism<'_>,
    pull: &[usize],
    source: &[Vec<Subset>],
    target: &[Vec<Subset>],
) -> Check<GameWitness> {
    for (sigma, eq) in source.iter().enumerate() {
        let image = &target[m.f.get(sigma)];
        if let Some((k, x)) = contravariant_scan(pull, m.alpha.forward_table(), eq, image) {
            return Err(GameWitness::at(m.target.space, sigma, x, k));
        }
    }
    Ok(())
}

/// Whether a game morphism is also a morphism between the `eps`-approximations.
pub fn check_game_functoriality(m: &GameMorphism<'_>, eps: ExtReal) -> Result<Check<GameWitness>> {
    let pull = m.beta.pullback_indices()?;
    if let Err(w) = morphism_scan(m, &pull, &m.source.equilibria, &m.target.equilibria) {
        return Err(Error::Precondition(format!("not a morphism of open games: {w}")));
    }
    let (ts, tt) = (t_eps_game(eps, m.source), t_eps_game(eps, m.target));
    Ok(morphism_scan(m, &pull, &ts.equilibria, &tt.equilibria))
}

fn pair_labels(left: &[String], right: &[String]) -> Vec<String> {
    left.iter().flat_map(|a| right.iter().map(move |b| format!("({a},{b})"))).collect()
}

/// `H ∘ G`: play `G` then `H`. Strategy `(σ,τ)` sits at index `σ·|Ω| + τ`.
pub fn seq_compose(h: &OpenGame, g: &OpenGame) -> Result<OpenGame> {
    if g.codomain != h.domain {
        return Err(Error::BoundaryMismatch { expected: g.codomain.to_string(), found: h.domain.to_string() });
    }
    let pulls: Vec<Vec<usize>> = h.lenses.iter().map(|l| l.pullback_indices()).collect::<Result<_>>()?;
    let mut lenses = Vec::with_capacity(g.lenses.len() * h.lenses.len());
    let mut equilibria = Vec::with_capacity(lenses.capacity());
    for (gl, ge) in g.lenses.iter().zip(&g.equilibria) {
        for ((hl, he), pull) in h.lenses.iter().zip(&h.equilibria).zip(&pulls) {
            lenses.push(compose_lens(hl, gl)?);
            equilibria.push(seq_row(gl.forward_table(), ge, he, pull));
        }
    }
    OpenGame::new(g.domain.clone(), h.codomain.clone(), pair_labels(&g.strategies, &h.strategies), lenses, equilibria)
}

/// `x ∈ E_G(k.Hτ) ∧ Gσ x ∈ E_H k`, for every `k`.
pub(crate) fn seq_row(g_fwd: &[usize], g_eq: &[Subset], h_eq: &[Subset], h_pull: &[usize]) -> Vec<Subset> {
    h_eq.iter()
        .zip(h_pull)
        .map(|(&hk, &kh)| g_eq[kh].iter().filter(|&x| hk.contains(g_fwd[x])).collect())
        .collect()
}

/// Nash tensor: each factor is judged against the other's play.
pub fn nash_tensor_game(g: &OpenGame, h: &OpenGame) -> Result<OpenGame> {
    let domain = g.domain.tensor(&h.domain);
    let codomain = g.codomain.tensor(&h.codomain);
    let space = codomain.utility_space()?;
    let mut lenses = Vec::new();
    let mut equilibria = Vec::new();
    for (gl, ge) in g.lenses.iter().zip(&g.equilibria) {
        for (hl, he) in h.lenses.iter().zip(&h.equilibria) {
            lenses.push(tensor_lens(gl, hl));
            equilibria.push(tensor_row(space, g, gl, ge, h, hl, he));
        }
    }
    OpenGame::new(domain, codomain, pair_labels(&g.strategies, &h.strategies), lenses, equilibria)
}

fn tensor_row(
    space: FnSpace,
    g: &OpenGame,
    gl: &LensMap,
    ge: &[Subset],
    h: &OpenGame,
    hl: &LensMap,
    he: &[Subset],
) -> Vec<Subset> {
    let (nx, nx2) = (g.domain.fwd().len(), h.domain.fwd().len());
    let (ny, ny2) = (g.codomain.fwd().len(), h.codomain.fwd().len());
    let nr2 = h.codomain.bwd().len();
    let mut entries = vec![0usize; space.domain];
    (0..space.count())
        .map(|ki| {
            decode_into(space, ki, &mut entries);
            let a: Vec<usize> = (0..nx2)
                .map(|x2| {
                    let y2 = hl.forward(x2);
                    (0..ny).fold(0, |acc, y| acc * g.space.codomain + entries[y * ny2 + y2] / nr2)
                })
                .collect();
            let b: Vec<usize> = (0..nx)
                .map(|x| {
                    let y = gl.forward(x);
                    (0..ny2).fold(0, |acc, y2| acc * h.space.codomain + entries[y * ny2 + y2] % nr2)
                })
                .collect();
            let mut set = Subset::EMPTY;
            for x in 0..nx {
                for x2 in 0..nx2 {
                    if ge[a[x2]].contains(x) && he[b[x]].contains(x2) {
                        set.insert(x * nx2 + x2);
                    }
                }
            }
            set
        })
        .collect()
}

/// Both directions between `T_eps(H ∘ G)` and `T_eps H ∘ T_eps G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqApproxReport {
    /// `T_eps(H ∘ G) ⊆ T_eps H ∘ T_eps G`.
    pub forward: Check<GameWitness>,
    /// `T_eps H ∘ T_eps G ⊆ T_eps(H ∘ G)`, searched and recorded.
    pub reverse: Check<GameWitness>,
}

/// `g` is played first; strategies of the composite are indexed as in [`seq_compose`].
pub fn check_seq_approx(g: &OpenGame, h: &OpenGame, eps: ExtReal) -> Result<SeqApproxReport> {
    let whole = t_eps_game(eps, &seq_compose(h, g)?);
    let parts = seq_compose(&t_eps_game(eps, h), &t_eps_game(eps, g))?;
    Ok(SeqApproxReport {
        forward: tables_leq(whole.space, &whole.equilibria, &parts.equilibria),
        reverse: tables_leq(whole.space, &parts.equilibria, &whole.equilibria),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameMonoidalViolation {
    pub direction: MonoidalDirection,
    pub witness: GameWitness,
}

impl fmt::Display for GameMonoidalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            MonoidalDirection::Lax => "T(G*H) within TG*TH",
            MonoidalDirection::Oplax => "TG*TH within T(G*H)",
        };
        write!(f, "{dir} fails at {}", self.witness)
    }
}

/// Equality of `T_eps(G ⊗ H)` and `T_eps G ⊗ T_eps H`, direction of the first failure.
pub fn check_game_monoidal(
    g: &OpenGame,
    h: &OpenGame,
    eps: ExtReal,
) -> Result<Check<GameMonoidalViolation>> {
    let lhs = t_eps_game(eps, &nash_tensor_game(g, h)?);
    let rhs = nash_tensor_game(&t_eps_game(eps, g), &t_eps_game(eps, h))?;
    let lax = tables_leq(lhs.space, &lhs.equilibria, &rhs.equilibria)
        .map_err(|witness| GameMonoidalViolation { direction: MonoidalDirection::Lax, witness });
    Ok(lax.and_then(|()| {
        tables_leq(lhs.space, &rhs.equilibria, &lhs.equilibria)
            .map_err(|witness| GameMonoidalViolation { direction: MonoidalDirection::Oplax, witness })
    }))
}

/// The graded laws on games: `T_0 = id`, monotone in `eps`, `T_eps T_delta ⊆ T_(eps+delta)`.
pub fn check_game_graded(g: &OpenGame, eps: ExtReal, delta: ExtReal) -> Check<GameWitness> {
    let t0 = t_eps_game(ExtReal::ZERO, g);
    tables_leq(g.space, &t0.equilibria, &g.equilibria)?;
    tables_leq(g.space, &g.equilibria, &t0.equilibria)?;
    let sum = eps + delta;
    let (te, td, ts) = (t_eps_game(eps, g), t_eps_game(delta, g), t_eps_game(sum, g));
    let (lo, hi) = if eps <= delta { (&te, &td) } else { (&td, &te) };
    tables_leq(g.space, &lo.equilibria, &hi.equilibria)?;
    tables_leq(g.space, &te.equilibria, &ts.equilibria)?;
    tables_leq(g.space, &td.equilibria, &ts.equilibria)?;
    let nested = t_eps_game(eps, &td);
    tables_leq(g.space, &nested.equilibria, &ts.equilibria)
}

/// The one-state game whose strategies are the actions of `s`: strategy `x`
/// plays `x` and is in equilibrium at `k` iff `x ∈ s(k)`.
pub fn sel_to_game(s: &SelectionFunction) -> Result<OpenGame> {
    let obj = s.object();
    let n = obj.fwd().len();
    let lenses = (0..n).map(|x| point_of(x, obj)).collect::<Result<Vec<_>>>()?;
    let equilibria = (0..n)
        .map(|x| s.table().iter().map(|sel| if sel.contains(x) { Subset::singleton(0) } else { Subset::EMPTY }).collect())
        .collect();
    OpenGame::new(LensObject::unit(), obj.clone(), obj.fwd().labels().to_vec(), lenses, equilibria)
}
