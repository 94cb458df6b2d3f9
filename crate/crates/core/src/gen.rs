//! Seeded random instances for sampled sweeps and round-trip tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lens::{LensMap, LensObject};
use crate::metric::{ExtReal, FinMetricSpace, Subset};
use crate::opengame::OpenGame;
use crate::selection::SelectionFunction;
use crate::specio::{Body, SelectionDoc, SpecDocument};

pub fn discrete(n: usize) -> FinMetricSpace {
    let labels: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    FinMetricSpace::discrete(labels).expect("distinct labels")
}

/// `(discrete n, grid{0..top})`
pub fn object(n: usize, top: u64) -> LensObject {
    LensObject::new(discrete(n), FinMetricSpace::grid(top)).expect("valid object")
}

/// `(discrete n, {0, 1})` with the two utilities infinitely far apart.
pub fn far_object(n: usize) -> LensObject {
    let v = FinMetricSpace::new(
        vec!["0".into(), "1".into()],
        vec![ExtReal::ZERO, ExtReal::INFINITY, ExtReal::INFINITY, ExtReal::ZERO],
        None,
    )
    .expect("valid metric");
    LensObject::new(discrete(n), v).expect("valid object")
}

pub fn subset<R: Rng>(rng: &mut R, n: usize) -> Subset {
    Subset(rng.gen::<u64>()) & Subset::full(n)
}

/// A metric obtained as the shortest-path closure of random edge weights,
/// possibly with unreachable pairs at infinity.
pub fn general_space<R: Rng>(rng: &mut R, n: usize) -> FinMetricSpace {
    let mut d = vec![ExtReal::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = ExtReal::ZERO;
        for j in i + 1..n {
            if rng.gen_bool(0.8) {
                let w = ExtReal::units(rng.gen_range(1..=3));
                d[i * n + j] = w;
                d[j * n + i] = w;
            }
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + m] + d[m * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let levels = rng.gen_bool(0.5).then(|| {
        let mut lv: Vec<u64> = (0..n as u64).map(|v| v * 2).collect();
        lv.shuffle(rng);
        lv
    });
    FinMetricSpace::new(labels, d, levels).expect("shortest-path closure is a metric")
}

pub fn space<R: Rng>(rng: &mut R, max_n: usize) -> FinMetricSpace {
    let n = rng.gen_range(1..=max_n);
    match rng.gen_range(0..3) {
        0 => FinMetricSpace::grid(n as u64 - 1),
        1 => discrete(n),
        _ => general_space(rng, n),
    }
}

pub fn lens_object<R: Rng>(rng: &mut R, max_x: usize, max_v: usize) -> LensObject {
    LensObject::new(space(rng, max_x), space(rng, max_v)).expect("valid spaces")
}

pub fn selection<R: Rng>(rng: &mut R, obj: &LensObject) -> SelectionFunction {
    let n = obj.fwd().len();
    SelectionFunction::from_fn(obj.clone(), |_| subset(rng, n)).expect("small object")
}

/// A lens map whose backward rows are short, by rejection with a constant fallback.
pub fn short_lens<R: Rng>(rng: &mut R, source: &LensObject, target: &LensObject) -> LensMap {
    let (nx, ny, nv, nw) = (source.fwd().len(), target.fwd().len(), source.bwd().len(), target.bwd().len());
    let fwd: Vec<usize> = (0..nx).map(|_| rng.gen_range(0..ny)).collect();
    let mut bwd = Vec::with_capacity(nx * nw);
    for _ in 0..nx {
        let row = (0..50)
            .map(|_| (0..nw).map(|_| rng.gen_range(0..nv)).collect::<Vec<_>>())
            .find(|row| {
                (0..nw).all(|a| (0..nw).all(|b| source.bwd().dist(row[a], row[b]) <= target.bwd().dist(a, b)))
            })
            .unwrap_or_else(|| vec![rng.gen_range(0..nv); nw]);
        bwd.extend(row);
    }
    LensMap::new(source.clone(), target.clone(), fwd, bwd).expect("in range")
}

pub fn game<R: Rng>(rng: &mut R, domain: &LensObject, codomain: &LensObject, strategies: usize) -> OpenGame {
    let count = codomain.utility_space().expect("small object").count();
    let nx = domain.fwd().len();
    let names = (0..strategies).map(|i| format!("s{i}")).collect();
    let lenses = (0..strategies).map(|_| short_lens(rng, domain, codomain)).collect();
    let equilibria = (0..strategies).map(|_| (0..count).map(|_| subset(rng, nx)).collect()).collect();
    OpenGame::new(domain.clone(), codomain.clone(), names, lenses, equilibria).expect("short lenses")
}

fn selection_doc<R: Rng>(rng: &mut R, depth: usize) -> SelectionDoc {
    let ordered = || LensObject::new(discrete(1), FinMetricSpace::grid(1)).expect("valid");
    match rng.gen_range(0..if depth == 0 { 4 } else { 3 }) {
        0 => {
            let obj = lens_object(rng, 2, 3);
            SelectionDoc::table(selection(rng, &obj))
        }
        1 => {
            let top = rng.gen_range(0..4);
            SelectionDoc::argmax(&object(rng.gen_range(1..=2), top)).expect("ordered")
        }
        2 => {
            let eps = if rng.gen_bool(0.2) { ExtReal::INFINITY } else { ExtReal::units(rng.gen_range(0..3)) };
            SelectionDoc::eps_argmax(&object(rng.gen_range(1..=2), rng.gen_range(0..3)), eps).expect("ordered")
        }
        _ => {
            let a = selection_doc(rng, depth + 1);
            let b = if rng.gen_bool(0.5) { SelectionDoc::argmax(&ordered()).expect("ordered") } else { selection_doc(rng, depth + 1) };
            SelectionDoc::tensor(a, b).expect("small product")
        }
    }
}

/// A random valid document of a random kind.
pub fn document<R: Rng>(rng: &mut R) -> SpecDocument {
    let unit = ["1", "0.5", "0.25", "10", "0.001"].choose(rng).expect("nonempty").to_string();
    let body = match rng.gen_range(0..4) {
        0 => Body::MetricSpace(space(rng, 5)),
        1 => {
            let (s, t) = (lens_object(rng, 3, 3), lens_object(rng, 3, 3));
            Body::Lens(short_lens(rng, &s, &t))
        }
        2 => {
            let mut doc = selection_doc(rng, 0);
            if rng.gen_bool(0.3) {
                let space = doc.function.space();
                let q = (0..rng.gen_range(1..=3)).map(|_| space.table(rng.gen_range(0..space.count()))).collect();
                doc = doc.with_queries(q);
            }
            Body::Selection(doc)
        }
        _ => {
            let (d, c) = (lens_object(rng, 2, 3), lens_object(rng, 2, 2));
            let n = rng.gen_range(1..=2);
            Body::OpenGame(game(rng, &d, &c, n))
        }
    };
    SpecDocument { unit, body }
}
