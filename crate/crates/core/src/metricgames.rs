//! Distance between selection functions over a common object: the least
//! `eps` at which each is contained in the `eps`-approximation of the other.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lens::LensObject;
use crate::metric::{ExtReal, FinMetricSpace, Subset};
use crate::selection::{nash_product, nth_selection, selection_count, t_eps, Check, SelectionFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameDistance {
    pub value: ExtReal,
    /// Mutual containment holds at `value` itself. False only when no
    /// radius, however large, relates the two.
    pub witnessed: bool,
}

impl fmt::Display for GameDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Radii at which `T_eps` can change: the realized distances of `V`, then infinity.
pub fn candidate_radii(v: &FinMetricSpace) -> Vec<ExtReal> {
    let mut out = v.realized_distances();
    if out.last() != Some(&ExtReal::INFINITY) {
        out.push(ExtReal::INFINITY);
    }
    out
}

fn within(a: &[Subset], b: &[Subset]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_subset(*y))
}

pub fn sel_distance(s: &SelectionFunction, t: &SelectionFunction) -> Result<GameDistance> {
    if s.object() != t.object() {
        return Err(Error::ObjectMismatch);
    }
    for eps in candidate_radii(s.object().bwd()) {
        if within(s.table(), t_eps(eps, t).table()) && within(t.table(), t_eps(eps, s).table()) {
            return Ok(GameDistance { value: eps, witnessed: true });
        }
    }
    Ok(GameDistance { value: ExtReal::INFINITY, witnessed: false })
}

/// Every selection function over `actions` discrete actions and utilities `grid{0..top}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricScale {
    pub actions: usize,
    pub top: u64,
}

/// Instances are indices into the enumeration of [`nth_selection`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricReport {
    pub object: LensObject,
    pub functions: usize,
    pub reflexive: Check<usize>,
    pub symmetry: Check<(usize, usize)>,
    /// `(s, t, u)` with `d(s,u) > d(s,t) + d(t,u)`.
    pub triangle: Check<(usize, usize, usize)>,
    pub triangle_instances: u64,
    /// `(s, eps)` with `d(s, T_eps s) > eps`.
    pub approximation: Check<(usize, ExtReal)>,
    /// `(s', t', eps)` such that some `s, t` within `eps` of them have
    /// `d(s ⊗ t, s' ⊗ t') > eps`.
    pub substitution: Check<(usize, usize, ExtReal)>,
    /// Quadruples `(s, s', t, t')` covered by the substitution check.
    pub substitution_instances: u64,
    /// Distinct functions at distance zero, if any exist at this scale.
    pub pseudo: Option<(usize, usize)>,
}

impl MetricReport {
    pub fn holds(&self) -> bool {
        self.reflexive.is_ok()
            && self.symmetry.is_ok()
            && self.triangle.is_ok()
            && self.approximation.is_ok()
            && self.substitution.is_ok()
    }
}

const MAX_POOL: usize = 1024;

/// Exhaustive pseudometric and substitution checks at one scale.
///
/// The substitution bound quantifies over quadruples. Since the Nash product
/// is a pointwise union in each argument, `s ⊗ t ⊆ W` for every `s` near `s'`
/// and `t` near `t'` iff `(∪s) ⊗ (∪t) ⊆ W`, so each pair `(s', t')` is
/// checked once against the unions of its neighbourhoods. Containment the
/// other way round is the same statement with the roles swapped.
pub fn check_metric_props(scale: MetricScale, exec: Exec) -> Result<MetricReport> {
    let labels: Vec<String> = (0..scale.actions).map(|i| format!("x{i}")).collect();
    let object = LensObject::new(FinMetricSpace::discrete(labels)?, FinMetricSpace::grid(scale.top))?;
    let n = selection_count(&object)?;
    if n > MAX_POOL {
        return Err(Error::TooLarge(format!("{n} selection functions over {object} (limit {MAX_POOL})")));
    }
    let pool: Vec<SelectionFunction> = (0..n).map(|i| nth_selection(&object, i)).collect::<Result<_>>()?;
    let radii = candidate_radii(object.bwd());
    let approx: Vec<Vec<SelectionFunction>> = pool.iter().map(|s| radii.iter().map(|&e| t_eps(e, s)).collect()).collect();

    // dist[i][j] as an index into radii; radii.len() means unrelated.
    let dist: Vec<Vec<usize>> = exec.map(n, |i| {
        (0..n)
            .map(|j| {
                (0..radii.len())
                    .find(|&r| within(pool[i].table(), approx[j][r].table()) && within(pool[j].table(), approx[i][r].table()))
                    .unwrap_or(radii.len())
            })
            .collect()
    });
    let value = |r: usize| radii.get(r).copied().unwrap_or(ExtReal::INFINITY);

    let reflexive = match (0..n).find(|&i| dist[i][i] != 0) {
        Some(i) => Err(i),
        None => Ok(()),
    };
    let symmetry = match (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| dist[i][j] != dist[j][i]) {
        Some(p) => Err(p),
        None => Ok(()),
    };
    let pseudo = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i != j && dist[i][j] == 0);

    // Only finite legs constrain the triangle inequality.
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|t| (0..n).filter(|&s| value(dist[s][t]).is_finite()).collect())
        .collect();
    let triangle_instances = neighbours.iter().map(|v| (v.len() * v.len()) as u64).sum();
    let triangle = match exec.find_first(n, |t| {
        for &s in &neighbours[t] {
            for &u in &neighbours[t] {
                if value(dist[s][u]) > value(dist[s][t]) + value(dist[t][u]) {
                    return Some((s, t, u));
                }
            }
        }
        None
    }) {
        Some((_, w)) => Err(w),
        None => Ok(()),
    };

    let approximation = match exec.find_first(n, |i| {
        radii.iter().enumerate().find_map(|(r, &eps)| {
            sel_distance(&pool[i], &approx[i][r]).ok().filter(|d| d.value > eps).map(|_| (i, eps))
        })
    }) {
        Some((_, w)) => Err(w),
        None => Ok(()),
    };

    nash_product(&pool[0], &pool[0])?;
    let mut substitution = Ok(());
    let mut substitution_instances = 0u64;
    // At infinity both sides of the bound hold for every quadruple.
    for (r, &eps) in radii.iter().enumerate().filter(|(_, e)| e.is_finite()) {
        let near: Vec<Vec<usize>> = (0..n).map(|j| (0..n).filter(|&i| dist[i][j] <= r).collect()).collect();
        let unions: Vec<SelectionFunction> = near
            .iter()
            .map(|idx| {
                let table = (0..pool[0].table().len())
                    .map(|k| idx.iter().fold(Subset::EMPTY, |acc, &i| acc | pool[i].at(k)))
                    .collect();
                SelectionFunction::new(object.clone(), table)
            })
            .collect::<Result<_>>()?;
        substitution_instances += near.iter().map(|v| v.len() as u64).sum::<u64>().pow(2);
        let found = exec.find_first(n * n, |pair| {
            let (s2, t2) = (pair / n, pair % n);
            let target = t_eps(eps, &nash_product(&pool[s2], &pool[t2]).ok()?);
            let reach = nash_product(&unions[s2], &unions[t2]).ok()?;
            (!within(reach.table(), target.table())).then_some((s2, t2, eps))
        });
        if let Some((_, w)) = found {
            substitution = Err(w);
            break;
        }
    }

    Ok(MetricReport {
        object,
        functions: n,
        reflexive,
        symmetry,
        triangle,
        triangle_instances,
        approximation,
        substitution,
        substitution_instances,
        pseudo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::within_ball;
    use crate::selection::{argmax_sel, eps_argmax_sel};

    fn obj(n: usize, top: u64) -> LensObject {
        let labels: Vec<String> = ["a", "b", "c"][..n].iter().map(|s| s.to_string()).collect();
        LensObject::new(FinMetricSpace::discrete(labels).unwrap(), FinMetricSpace::grid(top)).unwrap()
    }

    // Least radius by definition: enumerate balls around every k directly.
    fn distance_oracle(s: &SelectionFunction, t: &SelectionFunction, top: u64) -> ExtReal {
        let contained = |a: &SelectionFunction, b: &SelectionFunction, e: u64| {
            a.space().tables().all(|k| {
                let reach = within_ball(&k, ExtReal::units(e), a.object().bwd())
                    .iter()
                    .fold(Subset::EMPTY, |acc, k2| acc | b.select(k2));
                a.select(&k).is_subset(reach)
            })
        };
        (0..=top)
            .find(|&e| contained(s, t, e) && contained(t, s, e))
            .map_or(ExtReal::INFINITY, ExtReal::units)
    }

    #[test]
    fn argmax_against_relaxed_argmax() {
        let o = obj(2, 2);
        let am = argmax_sel(&o).unwrap();
        let one = eps_argmax_sel(&o, ExtReal::units(1)).unwrap();
        let oracle = distance_oracle(&am, &one, 2);
        assert_eq!(oracle, ExtReal::units(1));
        assert_eq!(sel_distance(&am, &one).unwrap(), GameDistance { value: oracle, witnessed: true });
    }

    #[test]
    fn distance_basics() {
        let o = obj(2, 2);
        let am = argmax_sel(&o).unwrap();
        assert_eq!(sel_distance(&am, &am).unwrap().value, ExtReal::ZERO);
        for e in 0..4 {
            let eps = ExtReal::units(e);
            assert!(sel_distance(&am, &t_eps(eps, &am)).unwrap().value <= eps);
        }
        let empty = SelectionFunction::new(o.clone(), vec![Subset::EMPTY; 9]).unwrap();
        assert_eq!(sel_distance(&am, &empty).unwrap(), GameDistance { value: ExtReal::INFINITY, witnessed: false });
        assert_eq!(sel_distance(&am, &argmax_sel(&obj(1, 2)).unwrap()), Err(Error::ObjectMismatch));
    }

    #[test]
    fn distance_matches_oracle_on_one_action() {
        let o = obj(1, 2);
        let n = selection_count(&o).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (s, t) = (nth_selection(&o, i).unwrap(), nth_selection(&o, j).unwrap());
                assert_eq!(sel_distance(&s, &t).unwrap().value, distance_oracle(&s, &t, 2), "{i} {j}");
            }
        }
    }

    #[test]
    fn props_at_small_scale() {
        for (actions, top) in [(1, 1), (1, 2), (1, 3)] {
            let r = check_metric_props(MetricScale { actions, top }, Exec::Sequential).unwrap();
            assert!(r.holds(), "{r:?}");
            assert_eq!(r.pseudo, None);
        }
        assert!(matches!(
            check_metric_props(MetricScale { actions: 2, top: 2 }, Exec::Sequential),
            Err(Error::TooLarge(_))
        ));
    }
}
