//! Law sweeps: exhaustive where the instance space is small enough, seeded
//! samples otherwise. Each sweep returns a [`Section`] saying which.
//!
//! The open-game sweeps at the two-element scale do not evaluate every game
//! directly. Whether a state `x` passes a law depends only on a handful of
//! entries (the play at `x`, the equilibrium row of `x`, ...), so every such
//! cell is evaluated once with the real game operations on a one-state game,
//! and the full instance space is then swept as a conjunction of cells. Each
//! cell sweep also replays random full instances through the direct checks
//! and fails if the two disagree.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gen;
use crate::lens::{identity_lens, short_lens_maps, LensMap, LensObject};
use crate::metric::{ExtReal, FnTable, Subset};
use crate::metricgames::{check_metric_props, MetricScale};
use crate::opengame::{
    check_game_functoriality, check_game_monoidal, check_seq_approx, is_game_morphism, sel_to_game, t_eps_game,
    GameMorphism, OpenGame,
};
use crate::selection::{
    argmax_sel, check_argmax_sandwich, check_functoriality, check_graded, compare_monoidal, contravariant_scan,
    covariant_scan, eps_argmax_sel, nash_product, nth_selection, selection_count, t_eps, SelMorphism,
    SelectionFunction,
};
use crate::specio::{parse, serialize};

pub const SUITES: [&str; 8] =
    ["graded", "functorial", "monoidal-sel", "argmax-sandwich", "game-functorial", "seq-approx", "game-monoidal", "metric"];

/// Selection-function pools up to this size are swept exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_x: usize,
    /// Largest utility value: utilities range over `grid{0..max_v}`.
    pub max_v: u64,
    pub max_sigma: usize,
    pub eps_steps: u64,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_x: 3, max_v: 4, max_sigma: 2, eps_steps: 2, seed: 0, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Violated(String),
    /// A finding reported for information; never fails a suite.
    Recorded(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    pub exhaustive: bool,
    pub instances: u64,
    pub skipped: u64,
    pub outcome: Outcome,
}

impl Section {
    pub fn ok(&self) -> bool {
        !matches!(self.outcome, Outcome::Violated(_))
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = if self.exhaustive { "exhaustive" } else { "sampled" };
        write!(f, "{}: {mode} instances={} skipped={} ", self.title, self.instances, self.skipped)?;
        match &self.outcome {
            Outcome::Holds => write!(f, "ok"),
            Outcome::Violated(w) => write!(f, "VIOLATED {w}"),
            Outcome::Recorded(w) => write!(f, "recorded {w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub sections: Vec<Section>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::ok)
    }
}

fn outcome(found: Option<String>) -> Outcome {
    found.map_or(Outcome::Holds, Outcome::Violated)
}

fn eps_range(max: u64) -> impl Iterator<Item = ExtReal> {
    (0..=max).map(ExtReal::units)
}

fn within(a: &[Subset], b: &[Subset]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_subset(*y))
}

// ------------------------------------------------------- selection functions

/// Every selection function over `(n actions, grid{0..top})`: `T_0 s = s`,
/// `T` monotone in the radius, and `T_eps T_delta s ⊆ T_(eps+delta) s` for
/// `eps, delta <= eps_max`.
pub fn graded_exhaustive(n: usize, top: u64, eps_max: u64, exec: Exec) -> Result<Section> {
    let obj = gen::object(n, top);
    let count = selection_count(&obj)?;
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge(format!("{count} selection functions over {obj}")));
    }
    let found = exec.find_first(count, |i| {
        let s = nth_selection(&obj, i).ok()?;
        let radii: Vec<SelectionFunction> = (0..=2 * eps_max).map(|e| t_eps(ExtReal::units(e), &s)).collect();
        if radii[0] != s {
            return Some("T_0 s != s".to_string());
        }
        if let Some(e) = (0..2 * eps_max as usize).find(|&e| !within(radii[e].table(), radii[e + 1].table())) {
            return Some(format!("T_{e} s not within T_{} s", e + 1));
        }
        for e in 0..=eps_max as usize {
            for d in 0..=eps_max as usize {
                if !within(t_eps(ExtReal::units(e as u64), &radii[d]).table(), radii[e + d].table()) {
                    return Some(format!("T_{e} T_{d} s not within T_{} s", e + d));
                }
            }
        }
        None
    });
    Ok(Section {
        title: format!("graded |X|={n} V=grid{{0..{top}}} eps,delta<={eps_max}"),
        exhaustive: true,
        instances: count as u64 * (eps_max + 1).pow(2),
        skipped: 0,
        outcome: outcome(found.map(|(i, w)| format!("selection #{i}: {w}"))),
    })
}

/// [`check_graded`] on argmax, every eps-argmax, and `samples` random tables.
pub fn graded_sampled(n: usize, top: u64, eps_max: u64, samples: usize, seed: u64) -> Result<Section> {
    let obj = gen::object(n, top);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = vec![("argmax".to_string(), argmax_sel(&obj)?)];
    for e in 1..=2 * eps_max {
        pool.push((format!("{e}-argmax"), eps_argmax_sel(&obj, ExtReal::units(e))?));
    }
    pool.push(("inf-argmax".into(), eps_argmax_sel(&obj, ExtReal::INFINITY)?));
    for i in 0..samples {
        pool.push((format!("random #{i}"), gen::selection(&mut rng, &obj)));
    }
    let mut found = None;
    'outer: for (name, s) in &pool {
        for e in eps_range(eps_max) {
            for d in eps_range(eps_max) {
                if let Err(v) = check_graded(s, e, d) {
                    found = Some(format!("{name} eps={e} delta={d}: {v}"));
                    break 'outer;
                }
            }
        }
    }
    Ok(Section {
        title: format!("graded |X|={n} V=grid{{0..{top}}} argmax family + {samples} random"),
        exhaustive: false,
        instances: pool.len() as u64 * (eps_max + 1).pow(2),
        skipped: 0,
        outcome: outcome(found),
    })
}

pub fn sandwich(n: usize, top: u64, eps: ExtReal) -> Result<Section> {
    let obj = gen::object(n, top);
    let r = check_argmax_sandwich(&obj, eps)?;
    let found = match (&r.upper, &r.lower) {
        (Err(w), _) => Some(format!("T_eps(argmax) not within 2eps-argmax at {w}")),
        (_, Err(w)) => Some(format!("eps-argmax not within T_eps(argmax) at {w}")),
        _ => None,
    };
    Ok(Section {
        title: format!(
            "argmax sandwich |X|={n} V=grid{{0..{top}}} eps={eps} (skipped still contained: {})",
            r.skipped_held
        ),
        exhaustive: true,
        instances: r.functions as u64,
        skipped: r.skipped.len() as u64,
        outcome: outcome(found),
    })
}

fn all_selections(obj: &LensObject) -> Result<Vec<SelectionFunction>> {
    (0..selection_count(obj)?).map(|i| nth_selection(obj, i)).collect()
}

/// Every short lens `a -> b` and every pair of selection functions it
/// relates: the lens must relate their `eps`-approximations as well.
pub fn functoriality_exhaustive(a: &LensObject, b: &LensObject, eps: &[ExtReal], exec: Exec) -> Result<Section> {
    let lenses = short_lens_maps(a, b)?;
    let pulls: Vec<Vec<usize>> = lenses.iter().map(LensMap::pullback_indices).collect::<Result<_>>()?;
    let (sa, sb) = (all_selections(a)?, all_selections(b)?);
    let approx = |pool: &[SelectionFunction]| -> Vec<Vec<SelectionFunction>> {
        pool.iter().map(|s| eps.iter().map(|&e| t_eps(e, s)).collect()).collect()
    };
    let (ta, tb) = (approx(&sa), approx(&sb));
    let outer = lenses.len() * sa.len();
    let morphisms = exec.sum(outer, |i| {
        let (l, s) = (i / sa.len(), i % sa.len());
        sb.iter()
            .filter(|t| contravariant_scan(&pulls[l], lenses[l].forward_table(), sa[s].table(), t.table()).is_none())
            .count() as u64
    });
    let found = exec.find_first(outer, |i| {
        let (l, s) = (i / sa.len(), i % sa.len());
        let fwd = lenses[l].forward_table();
        for (t, sel) in sb.iter().enumerate() {
            if contravariant_scan(&pulls[l], fwd, sa[s].table(), sel.table()).is_some() {
                continue;
            }
            for (e, &eps) in eps.iter().enumerate() {
                if let Some((k, x)) = contravariant_scan(&pulls[l], fwd, ta[s][e].table(), tb[t][e].table()) {
                    return Some(format!("lens #{l}, s=#{s}, t=#{t}, eps={eps}: k=#{k} x={x}"));
                }
            }
        }
        None
    });
    Ok(Section {
        title: format!("functoriality {a} -> {b}"),
        exhaustive: true,
        instances: morphisms * eps.len() as u64,
        skipped: 0,
        outcome: outcome(found.map(|(_, w)| w)),
    })
}

/// A random selection function `s` on `lens.source()` making `lens` a
/// morphism `s -> t`: the least such `s` plus random extra actions.
fn morphism_source<R: Rng>(rng: &mut R, lens: &LensMap, t: &SelectionFunction) -> Result<SelectionFunction> {
    let pull = lens.pullback_indices()?;
    let n = lens.source().fwd().len();
    let count = lens.source().utility_space()?.count();
    let mut table: Vec<Subset> = (0..count).map(|_| if rng.gen_bool(0.3) { gen::subset(rng, n) } else { Subset::EMPTY }).collect();
    for (k, &ka) in pull.iter().enumerate() {
        for x in 0..n {
            if t.at(k).contains(lens.forward(x)) {
                table[ka].insert(x);
            }
        }
    }
    SelectionFunction::new(lens.source().clone(), table)
}

/// Random morphisms between random objects within the caps, through
/// [`check_functoriality`].
pub fn functoriality_sampled(caps: &Caps, samples: usize) -> Result<Section> {
    let mut rng = ChaCha8Rng::seed_from_u64(caps.seed ^ 0xf00d);
    let mut found = None;
    for i in 0..samples {
        let a = gen::object(rng.gen_range(1..=caps.max_x), rng.gen_range(0..=caps.max_v));
        let b = gen::object(rng.gen_range(1..=caps.max_x), rng.gen_range(0..=caps.max_v));
        let lens = gen::short_lens(&mut rng, &a, &b);
        let t = gen::selection(&mut rng, &b);
        let s = morphism_source(&mut rng, &lens, &t)?;
        let m = SelMorphism::new(lens, &s, &t)?;
        for eps in eps_range(caps.eps_steps) {
            if let Err(w) = check_functoriality(&m, eps)? {
                found.get_or_insert(format!("sample #{i} {a} -> {b} eps={eps}: {w}"));
            }
        }
    }
    Ok(Section {
        title: format!("functoriality random morphisms |X|<={} V<=grid{{0..{}}}", caps.max_x, caps.max_v),
        exhaustive: false,
        instances: samples as u64 * (caps.eps_steps + 1),
        skipped: 0,
        outcome: outcome(found),
    })
}

/// Looks for a lens that satisfies the covariant morphism condition between
/// `s` and `t` but not between `T_eps s` and `T_eps t`.
pub fn covariant_search(objects: &[LensObject], eps: ExtReal) -> Result<Section> {
    let mut instances = 0u64;
    for a in objects {
        let sa = all_selections(a)?;
        for b in objects {
            let sb = all_selections(b)?;
            let lenses = short_lens_maps(a, b)?;
            let ta: Vec<_> = sa.iter().map(|s| t_eps(eps, s)).collect();
            let tb: Vec<_> = sb.iter().map(|s| t_eps(eps, s)).collect();
            for lens in &lenses {
                let pull = lens.pullback_indices()?;
                for (i, s) in sa.iter().enumerate() {
                    for (j, t) in sb.iter().enumerate() {
                        if covariant_scan(&pull, lens.forward_table(), s.table(), t.table()).is_some() {
                            continue;
                        }
                        instances += 1;
                        if let Some((k, x)) = covariant_scan(&pull, lens.forward_table(), ta[i].table(), tb[j].table()) {
                            let k = b.utility_space()?.table(k);
                            return Ok(Section {
                                title: format!("covariant morphisms under T eps={eps}"),
                                exhaustive: true,
                                instances,
                                skipped: 0,
                                outcome: Outcome::Recorded(format!(
                                    "counterexample {a} -> {b}: lens forward={:?} backward={:?}, s={:?}, t={:?}, fails at k={k} x={x}",
                                    lens.forward_table(),
                                    lens.backward_table(),
                                    s.table().iter().map(|v| v.0).collect::<Vec<_>>(),
                                    t.table().iter().map(|v| v.0).collect::<Vec<_>>(),
                                )),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(Section {
        title: format!("covariant morphisms under T eps={eps}"),
        exhaustive: true,
        instances,
        skipped: 0,
        outcome: Outcome::Recorded("no counterexample at this scale".into()),
    })
}

/// Table equality of `T_eps(G ⊗ H)` and `T_eps G ⊗ T_eps H` for all pairs
/// from argmax, 1-argmax and `random` random tables on `obj`.
pub fn monoidal_pool(obj: &LensObject, eps: &[ExtReal], random: usize, seed: u64, exec: Exec) -> Result<Section> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = vec![argmax_sel(obj)?, eps_argmax_sel(obj, ExtReal::units(1))?];
    pool.extend((0..random).map(|_| gen::selection(&mut rng, obj)));
    let approx: Vec<Vec<SelectionFunction>> = pool.iter().map(|s| eps.iter().map(|&e| t_eps(e, s)).collect()).collect();
    nash_product(&pool[0], &pool[0])?;
    let n = pool.len();
    let found = exec.find_first(n * n, |p| {
        let (i, j) = (p / n, p % n);
        let prod = nash_product(&pool[i], &pool[j]).ok()?;
        eps.iter().enumerate().find_map(|(e, &r)| {
            let lhs = t_eps(r, &prod);
            let rhs = nash_product(&approx[i][e], &approx[j][e]).ok()?;
            compare_monoidal(&lhs, &rhs).err().map(|v| format!("pool #{i} x #{j} eps={r}: {v}"))
        })
    });
    Ok(Section {
        title: format!("Nash product {obj} x {obj}, argmax, 1-argmax and {random} random"),
        exhaustive: false,
        instances: (n * n * eps.len()) as u64,
        skipped: 0,
        outcome: outcome(found.map(|(_, w)| w)),
    })
}

pub fn embedding(count: usize, seed: u64) -> Result<Section> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = None;
    for i in 0..count {
        let obj = gen::object(rng.gen_range(1..=2), rng.gen_range(0..=3));
        let s = gen::selection(&mut rng, &obj);
        for eps in eps_range(1) {
            if t_eps_game(eps, &sel_to_game(&s)?) != sel_to_game(&t_eps(eps, &s))? {
                found.get_or_insert(format!("sample #{i} over {obj} eps={eps}"));
            }
        }
    }
    Ok(Section {
        title: "embedding commutes with T".into(),
        exhaustive: false,
        instances: count as u64 * 2,
        skipped: 0,
        outcome: outcome(found),
    })
}

// ------------------------------------------------------------ open games

/// Two actions with utilities in `{0,1}`: every set at the cell-sweep scale.
fn two() -> LensObject {
    gen::object(2, 1)
}

fn one() -> LensObject {
    gen::object(1, 1)
}

/// Equilibrium table with `member` present exactly at the set bits of `row`.
fn eq_from_row(row: usize, len: usize, member: usize) -> Vec<Subset> {
    (0..len).map(|k| if row >> k & 1 == 1 { Subset::singleton(member) } else { Subset::EMPTY }).collect()
}

/// Table number `e` over 4 continuations and 2 states, first continuation in the low bits.
fn eq_from_index(e: usize) -> Vec<Subset> {
    (0..4).map(|k| Subset((e >> (2 * k) & 3) as u64)).collect()
}

fn row_of(eq: &[Subset], x: usize) -> usize {
    eq.iter().enumerate().filter(|(_, s)| s.contains(x)).map(|(k, _)| 1 << k).sum()
}

fn single(domain: &LensObject, codomain: &LensObject, lens: LensMap, eq: Vec<Subset>) -> Result<OpenGame> {
    OpenGame::new(domain.clone(), codomain.clone(), vec!["s".into()], vec![lens], vec![eq])
}

/// A one-state game playing `y` with constant backward map.
fn point_game(y: usize, row: usize) -> Result<OpenGame> {
    let (one, two) = (one(), two());
    let lens = LensMap::new(one.clone(), two.clone(), vec![y], vec![0; 2])?;
    single(&one, &two, lens, eq_from_row(row, 4, 0))
}

fn forward_pair(i: usize) -> [usize; 2] {
    [i / 2, i % 2]
}

/// Forward and reverse containment between `T_eps(H ∘ G)` and
/// `T_eps H ∘ T_eps G` over every pair of single-strategy games on
/// two-element sets with utilities in `{0,1}`.
pub fn seq_cells(eps: ExtReal, exec: Exec, seed: u64) -> Result<(Section, Section)> {
    let two = two();
    let lenses = short_lens_maps(&two, &two)?;
    let nl = lenses.len();
    // cell ((h, y0), row of x in E_G, row of y0 in E_H) -> (forward ok, reverse ok)
    let cells: Vec<(bool, bool)> = exec
        .map(nl * 2 * 256, |c| {
            let (h, y0, rg, rh) = (c / 512, c / 256 % 2, c / 16 % 16, c % 16);
            let g = point_game(y0, rg)?;
            let hg = single(&two, &two, lenses[h].clone(), eq_from_row(rh, 4, y0))?;
            let r = check_seq_approx(&g, &hg, eps)?;
            Ok((r.forward.is_ok(), r.reverse.is_ok()))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let rows: Vec<[usize; 2]> = (0..256).map(|e| [row_of(&eq_from_index(e), 0), row_of(&eq_from_index(e), 1)]).collect();
    let cell = |fwd: [usize; 2], eg: usize, h: usize, eh: usize, x: usize| {
        let y0 = fwd[x];
        cells[((h * 2 + y0) * 16 + rows[eg][x]) * 16 + rows[eh][y0]]
    };
    let classes = 4 * 256 * nl * 256;
    let split = |i: usize| (forward_pair(i / (256 * nl * 256)), i / (nl * 256) % 256, i / 256 % nl, i % 256);
    let describe = |i: usize| {
        let (fwd, eg, h, eh) = split(i);
        format!(
            "G forward={fwd:?} E_G={:?}, H forward={:?} backward={:?} E_H={:?}",
            eq_from_index(eg).iter().map(|s| s.0).collect::<Vec<_>>(),
            lenses[h].forward_table(),
            lenses[h].backward_table(),
            eq_from_index(eh).iter().map(|s| s.0).collect::<Vec<_>>()
        )
    };
    let forward = exec.find_first(classes, |i| {
        let (fwd, eg, h, eh) = split(i);
        (0..2).any(|x| !cell(fwd, eg, h, eh, x).0).then_some(())
    });
    let reverse_count = exec.sum(classes, |i| {
        let (fwd, eg, h, eh) = split(i);
        u64::from((0..2).any(|x| !cell(fwd, eg, h, eh, x).1))
    });
    let reverse_first = exec.find_first(classes, |i| {
        let (fwd, eg, h, eh) = split(i);
        (0..2).any(|x| !cell(fwd, eg, h, eh, x).1).then_some(())
    });

    // replay random full instances through the direct check
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreement = None;
    for _ in 0..200 {
        let gl = lenses[rng.gen_range(0..nl)].clone();
        let (eg, h, eh) = (rng.gen_range(0..256), rng.gen_range(0..nl), rng.gen_range(0..256));
        let fwd = [gl.forward(0), gl.forward(1)];
        let g = single(&two, &two, gl, eq_from_index(eg))?;
        let hg = single(&two, &two, lenses[h].clone(), eq_from_index(eh))?;
        let r = check_seq_approx(&g, &hg, eps)?;
        let by_cells = (0..2).fold((true, true), |acc, x| {
            let c = cell(fwd, eg, h, eh, x);
            (acc.0 && c.0, acc.1 && c.1)
        });
        if (r.forward.is_ok(), r.reverse.is_ok()) != by_cells {
            disagreement.get_or_insert(format!("cell kernel disagrees with direct check on {g:?}"));
        }
    }

    let represented = classes as u64 * 16;
    let fwd_outcome = match (disagreement, forward) {
        (Some(d), _) => Outcome::Violated(d),
        (None, Some((i, ()))) => Outcome::Violated(describe(i)),
        (None, None) => Outcome::Holds,
    };
    let rev_outcome = Outcome::Recorded(match reverse_first {
        Some((i, ())) => format!("{reverse_count} instance classes fail; first: {}", describe(i)),
        None => "no reverse counterexample at this scale".into(),
    });
    let title = |dir: &str| format!("sequential {dir} |X|=|Y|=|Z|=2 utilities {{0,1}} single strategy eps={eps}");
    Ok((
        Section { title: title("T(HG) within TH.TG"), exhaustive: true, instances: represented, skipped: 0, outcome: fwd_outcome },
        Section { title: title("TH.TG within T(HG)"), exhaustive: true, instances: represented, skipped: 0, outcome: rev_outcome },
    ))
}

/// Equality of `T_eps(G ⊗ H)` and `T_eps G ⊗ T_eps H` over every pair of
/// single-strategy games on two-element sets with utilities in `{0,1}`.
pub fn game_monoidal_cells(eps: ExtReal, exec: Exec, seed: u64) -> Result<Section> {
    let two = two();
    // cell (G play at x, H play at x', row of x in E_G, row of x' in E_H)
    let cells: Vec<bool> = exec
        .map(1024, |c| {
            let (g0, h0, rg, rh) = (c / 512, c / 256 % 2, c / 16 % 16, c % 16);
            let r = check_game_monoidal(&point_game(g0, rg)?, &point_game(h0, rh)?, eps)?;
            Ok(r.is_ok())
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let rows: Vec<[usize; 2]> = (0..256).map(|e| [row_of(&eq_from_index(e), 0), row_of(&eq_from_index(e), 1)]).collect();
    let verdict = |gf: [usize; 2], eg: usize, hf: [usize; 2], eh: usize| {
        (0..2).all(|x| (0..2).all(|x2| cells[((gf[x] * 2 + hf[x2]) * 16 + rows[eg][x]) * 16 + rows[eh][x2]]))
    };
    let classes = 4 * 256 * 4 * 256;
    let split = |i: usize| (forward_pair(i >> 18), i >> 10 & 255, forward_pair(i >> 8 & 3), i & 255);
    let found = exec.find_first(classes, |i| {
        let (gf, eg, hf, eh) = split(i);
        (!verdict(gf, eg, hf, eh)).then(|| format!("G forward={gf:?} E_G=#{eg}, H forward={hf:?} E_H=#{eh}"))
    });

    let lenses = short_lens_maps(&two, &two)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreement = None;
    for _ in 0..200 {
        let (gl, hl) = (lenses[rng.gen_range(0..lenses.len())].clone(), lenses[rng.gen_range(0..lenses.len())].clone());
        let (eg, eh) = (rng.gen_range(0..256), rng.gen_range(0..256));
        let (gf, hf) = ([gl.forward(0), gl.forward(1)], [hl.forward(0), hl.forward(1)]);
        let direct = check_game_monoidal(
            &single(&two, &two, gl, eq_from_index(eg))?,
            &single(&two, &two, hl, eq_from_index(eh))?,
            eps,
        )?;
        if direct.is_ok() != verdict(gf, eg, hf, eh) {
            disagreement.get_or_insert(format!("cell kernel disagrees with direct check at E_G=#{eg} E_H=#{eh}"));
        }
    }
    Ok(Section {
        title: format!("Nash tensor of games |X|=|Y|=2 utilities {{0,1}} single strategy eps={eps}"),
        exhaustive: true,
        instances: classes as u64 * 256,
        skipped: 0,
        outcome: outcome(disagreement.or(found.map(|(_, w)| w))),
    })
}

/// Every game morphism between single-strategy games on two-element sets
/// with utilities in `{0,1}` is also a morphism between the approximations.
pub fn game_functorial_cells(eps: ExtReal, exec: Exec, seed: u64) -> Result<Section> {
    let (one, two) = (one(), two());
    let lenses = short_lens_maps(&two, &two)?;
    let nl = lenses.len();
    let id = FnTable::new(vec![0], 1)?;
    let target_lens = identity_lens(&two);
    // cell (alpha play at x, beta, row of x in E, row of alpha(x) in E') -> (morphism, lifts)
    let cells: Vec<(bool, bool)> = exec
        .map(2 * nl * 256, |c| {
            let (a0, b, r, r2) = (c / (nl * 256), c / 256 % nl, c / 16 % 16, c % 16);
            let source = point_game(0, r)?;
            let target = single(&two, &two, target_lens.clone(), eq_from_row(r2, 4, a0))?;
            let alpha = LensMap::new(one.clone(), two.clone(), vec![a0], vec![0; 2])?;
            let m = GameMorphism::new(id.clone(), alpha, lenses[b].clone(), &source, &target)?;
            let morph = is_game_morphism(&m)?.is_ok();
            let lifts = !morph || check_game_functoriality(&m, eps)?.is_ok();
            Ok((morph, lifts))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let rows: Vec<[usize; 2]> = (0..256).map(|e| [row_of(&eq_from_index(e), 0), row_of(&eq_from_index(e), 1)]).collect();
    let verdict = |af: [usize; 2], b: usize, e: usize, e2: usize| {
        let c = |x: usize| cells[((af[x] * nl + b) * 16 + rows[e][x]) * 16 + rows[e2][af[x]]];
        let morph = (0..2).all(|x| c(x).0);
        (morph, !morph || (0..2).all(|x| c(x).1))
    };
    let classes = 4 * nl * 256 * 256;
    let split = |i: usize| (forward_pair(i / (nl * 65536)), i / 65536 % nl, i / 256 % 256, i % 256);
    let morphisms = exec.sum(classes, |i| {
        let (af, b, e, e2) = split(i);
        u64::from(verdict(af, b, e, e2).0)
    });
    let found = exec.find_first(classes, |i| {
        let (af, b, e, e2) = split(i);
        (!verdict(af, b, e, e2).1).then(|| format!("alpha forward={af:?} beta=#{b} E=#{e} E'=#{e2}"))
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreement = None;
    for _ in 0..200 {
        let alpha = lenses[rng.gen_range(0..nl)].clone();
        let b = rng.gen_range(0..nl);
        let (e, e2) = (rng.gen_range(0..256), rng.gen_range(0..256));
        let source = single(&two, &two, lenses[rng.gen_range(0..nl)].clone(), eq_from_index(e))?;
        let target = single(&two, &two, lenses[rng.gen_range(0..nl)].clone(), eq_from_index(e2))?;
        let af = [alpha.forward(0), alpha.forward(1)];
        let m = GameMorphism::new(id.clone(), alpha, lenses[b].clone(), &source, &target)?;
        let morph = is_game_morphism(&m)?.is_ok();
        let lifts = !morph || check_game_functoriality(&m, eps)?.is_ok();
        if (morph, lifts) != verdict(af, b, e, e2) {
            disagreement.get_or_insert(format!("cell kernel disagrees with direct check at E=#{e} E'=#{e2} beta=#{b}"));
        }
    }
    Ok(Section {
        title: format!("game functoriality |X|=|Y|=2 utilities {{0,1}} single strategy eps={eps} ({morphisms} morphism classes)"),
        exhaustive: true,
        instances: classes as u64 * (nl * nl * 16) as u64,
        skipped: 0,
        outcome: outcome(disagreement.or(found.map(|(_, w)| w))),
    })
}

fn random_games<R: Rng>(rng: &mut R, max_sigma: usize) -> (OpenGame, OpenGame) {
    let two = two();
    let (a, b) = (rng.gen_range(1..=max_sigma), rng.gen_range(1..=max_sigma));
    (gen::game(rng, &two, &two, a), gen::game(rng, &two, &two, b))
}

/// Sequential containment on random multi-strategy games; the reverse
/// direction is recorded.
pub fn seq_random(count: usize, max_sigma: usize, eps: &[ExtReal], seed: u64) -> Result<(Section, Section)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut forward, mut reverse, mut reverse_count) = (None, None, 0);
    for i in 0..count {
        let (g, h) = random_games(&mut rng, max_sigma);
        for &e in eps {
            let r = check_seq_approx(&g, &h, e)?;
            if let Err(w) = r.forward {
                forward.get_or_insert(format!("sample #{i} eps={e}: {w}"));
            }
            if let Err(w) = r.reverse {
                reverse_count += 1;
                reverse.get_or_insert(format!("sample #{i} eps={e}: {w}"));
            }
        }
    }
    let instances = (count * eps.len()) as u64;
    let title = |dir: &str| format!("sequential {dir} random games with up to {max_sigma} strategies");
    Ok((
        Section { title: title("T(HG) within TH.TG"), exhaustive: false, instances, skipped: 0, outcome: outcome(forward) },
        Section {
            title: title("TH.TG within T(HG)"),
            exhaustive: false,
            instances,
            skipped: 0,
            outcome: Outcome::Recorded(match reverse {
                Some(w) => format!("{reverse_count} failures; first {w}"),
                None => "no reverse counterexample".into(),
            }),
        },
    ))
}

pub fn game_monoidal_random(count: usize, max_sigma: usize, eps: &[ExtReal], seed: u64) -> Result<Section> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = None;
    for i in 0..count {
        let (g, h) = random_games(&mut rng, max_sigma);
        for &e in eps {
            if let Err(v) = check_game_monoidal(&g, &h, e)? {
                found.get_or_insert(format!("sample #{i} eps={e}: {v}"));
            }
        }
    }
    Ok(Section {
        title: format!("Nash tensor random games with up to {max_sigma} strategies"),
        exhaustive: false,
        instances: (count * eps.len()) as u64,
        skipped: 0,
        outcome: outcome(found),
    })
}

/// Random morphisms between random multi-strategy games, with the source
/// equilibria enlarged just enough to make the morphism condition hold.
pub fn game_functorial_random(count: usize, max_sigma: usize, eps: &[ExtReal], seed: u64) -> Result<Section> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = two();
    let mut found = None;
    for i in 0..count {
        let (g, target) = random_games(&mut rng, max_sigma);
        let alpha = gen::short_lens(&mut rng, &two, &two);
        let beta = gen::short_lens(&mut rng, &two, &two);
        let f = FnTable::new((0..g.strategies().len()).map(|_| rng.gen_range(0..target.strategies().len())).collect(), target.strategies().len())?;
        let pull = beta.pullback_indices()?;
        let mut equilibria = g.equilibria().to_vec();
        for (sigma, eq) in equilibria.iter_mut().enumerate() {
            let image = target.equilibrium(f.get(sigma));
            for (k, &kb) in pull.iter().enumerate() {
                for x in 0..2 {
                    if image[k].contains(alpha.forward(x)) {
                        eq[kb].insert(x);
                    }
                }
            }
        }
        let source = OpenGame::new(g.domain().clone(), g.codomain().clone(), g.strategies().to_vec(), g.lenses().to_vec(), equilibria)?;
        let m = GameMorphism::new(f, alpha, beta, &source, &target)?;
        for &e in eps {
            if let Err(w) = check_game_functoriality(&m, e)? {
                found.get_or_insert(format!("sample #{i} eps={e}: {w}"));
            }
        }
    }
    Ok(Section {
        title: format!("game functoriality random morphisms with up to {max_sigma} strategies"),
        exhaustive: false,
        instances: (count * eps.len()) as u64,
        skipped: 0,
        outcome: outcome(found),
    })
}

// ------------------------------------------------------------------ metric

pub fn metric(scale: MetricScale, exec: Exec) -> Result<Vec<Section>> {
    let r = check_metric_props(scale, exec)?;
    let title = |what: &str| format!("{what} |X|={} V=grid{{0..{}}}", scale.actions, scale.top);
    let n = r.functions as u64;
    let pseudo = match r.pseudo {
        Some((i, j)) => format!("distinct selections #{i} and #{j} at distance 0"),
        None => "no distinct pair at distance 0".into(),
    };
    Ok(vec![
        Section {
            title: title("d(s,s)=0 and symmetry"),
            exhaustive: true,
            instances: n * n,
            skipped: 0,
            outcome: outcome(
                r.reflexive.err().map(|i| format!("d(s,s) != 0 at #{i}")).or(r.symmetry.err().map(|(i, j)| format!("asymmetric at #{i}, #{j}"))),
            ),
        },
        Section {
            title: title("triangle inequality"),
            exhaustive: true,
            instances: r.triangle_instances,
            skipped: 0,
            outcome: outcome(r.triangle.err().map(|(s, t, u)| format!("#{s}, #{t}, #{u}"))),
        },
        Section {
            title: title("d(s, T_eps s) <= eps"),
            exhaustive: true,
            instances: n * (scale.top + 2),
            skipped: 0,
            outcome: outcome(r.approximation.err().map(|(s, e)| format!("#{s} eps={e}"))),
        },
        Section {
            title: title("Nash product substitution bound"),
            exhaustive: true,
            instances: r.substitution_instances,
            skipped: 0,
            outcome: outcome(r.substitution.err().map(|(s, t, e)| format!("around #{s} x #{t} eps={e}"))),
        },
        Section { title: title("pseudo-ness search"), exhaustive: true, instances: n * n, skipped: 0, outcome: Outcome::Recorded(pseudo) },
    ])
}

// ---------------------------------------------------------- serialization

pub fn round_trips(count: usize, seed: u64) -> Result<Section> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = None;
    for i in 0..count {
        let doc = gen::document(&mut rng);
        let text = serialize(&doc);
        match parse(&text) {
            Ok(back) if back == doc && serialize(&back) == text => {}
            Ok(_) => {
                found.get_or_insert(format!("document #{i} ({}) changed on round trip", doc.body.kind()));
            }
            Err(e) => {
                found.get_or_insert(format!("document #{i} ({}) failed to parse: {e}", doc.body.kind()));
            }
        }
    }
    Ok(Section { title: "serialize/parse round trip".into(), exhaustive: false, instances: count as u64, skipped: 0, outcome: outcome(found) })
}

// ------------------------------------------------------------------ suites

pub fn run_suite(name: &str, caps: &Caps) -> Result<SuiteReport> {
    if caps.max_x == 0 || caps.max_sigma == 0 {
        return Err(Error::invalid("caps must be positive"));
    }
    let exec = caps.exec;
    let eps: Vec<ExtReal> = eps_range(caps.eps_steps).collect();
    let mut sections = Vec::new();
    match name {
        "graded" => {
            for n in 1..=caps.max_x {
                for top in 0..=caps.max_v {
                    let obj = gen::object(n, top);
                    match selection_count(&obj) {
                        Ok(c) if c <= EXHAUSTIVE_LIMIT => sections.push(graded_exhaustive(n, top, caps.eps_steps, exec)?),
                        _ => sections.push(graded_sampled(n, top, caps.eps_steps, 500, caps.seed ^ (n as u64) << 8 ^ top)?),
                    }
                }
            }
        }
        "functorial" => {
            let mut small: Vec<LensObject> = (1..=caps.max_x.min(2))
                .flat_map(|n| (0..=caps.max_v.min(1)).map(move |top| gen::object(n, top)))
                .collect();
            small.extend((1..=caps.max_x.min(2)).map(gen::far_object));
            for a in &small {
                for b in &small {
                    sections.push(functoriality_exhaustive(a, b, &eps, exec)?);
                }
            }
            sections.push(functoriality_sampled(caps, 200)?);
            sections.push(covariant_search(&small, ExtReal::units(1))?);
        }
        "monoidal-sel" => sections.push(monoidal_pool(&gen::object(2, 1), &eps, 200, caps.seed, exec)?),
        "argmax-sandwich" => {
            for n in 1..=caps.max_x {
                for &e in &eps {
                    sections.push(sandwich(n, caps.max_v, e)?);
                }
            }
        }
        "game-functorial" => {
            for &e in &eps {
                sections.push(game_functorial_cells(e, exec, caps.seed)?);
            }
            sections.push(game_functorial_random(100, caps.max_sigma, &eps, caps.seed)?);
        }
        "seq-approx" => {
            for &e in &eps {
                let (f, r) = seq_cells(e, exec, caps.seed)?;
                sections.push(f);
                sections.push(r);
            }
            let (f, r) = seq_random(100, caps.max_sigma, &eps, caps.seed)?;
            sections.push(f);
            sections.push(r);
        }
        "game-monoidal" => {
            for &e in &eps {
                sections.push(game_monoidal_cells(e, exec, caps.seed)?);
            }
            sections.push(game_monoidal_random(100, caps.max_sigma, &eps, caps.seed)?);
            sections.push(embedding(100, caps.seed)?);
        }
        "metric" => {
            for n in 1..=caps.max_x {
                for top in 0..=caps.max_v {
                    let fits = selection_count(&gen::object(n, top)).is_ok_and(|c| c <= 1024);
                    if fits {
                        sections.extend(metric(MetricScale { actions: n, top }, exec)?);
                    }
                }
            }
        }
        other => return Err(Error::invalid(format!("unknown suite {other:?}; expected one of {} or all", SUITES.join(", ")))),
    }
    Ok(SuiteReport { suite: name.to_string(), sections })
}
