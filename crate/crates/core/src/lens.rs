//! Lenses over finite metric carriers.
//!
//! A lens object is a pair `(X, V)` of metric spaces. A lens map
//! `(X, V) -> (Y, W)` has a forward table `X -> Y` and a backward table
//! `X × W -> V`, the latter stored row-major by `x`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::{tensor_metric, validate_metric, FinMetricSpace, FnSpace, FnTable};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LensObject {
    fwd: Arc<FinMetricSpace>,
    bwd: Arc<FinMetricSpace>,
}

impl LensObject {
    pub fn new(fwd: FinMetricSpace, bwd: FinMetricSpace) -> Result<Self> {
        Self::from_arcs(Arc::new(fwd), Arc::new(bwd))
    }

    pub fn from_arcs(fwd: Arc<FinMetricSpace>, bwd: Arc<FinMetricSpace>) -> Result<Self> {
        validate_metric(&fwd)?.map_err(Error::Metric)?;
        validate_metric(&bwd)?.map_err(Error::Metric)?;
        Ok(LensObject { fwd, bwd })
    }

    /// The monoidal unit `I = (1, 1)`.
    pub fn unit() -> Self {
        let one = Arc::new(FinMetricSpace::unit());
        LensObject { fwd: one.clone(), bwd: one }
    }

    pub fn tensor(&self, other: &LensObject) -> LensObject {
        LensObject {
            fwd: Arc::new(tensor_metric(&self.fwd, &other.fwd)),
            bwd: Arc::new(tensor_metric(&self.bwd, &other.bwd)),
        }
    }

    pub fn fwd(&self) -> &FinMetricSpace {
        &self.fwd
    }

    pub fn bwd(&self) -> &FinMetricSpace {
        &self.bwd
    }

    pub fn fwd_arc(&self) -> &Arc<FinMetricSpace> {
        &self.fwd
    }

    pub fn bwd_arc(&self) -> &Arc<FinMetricSpace> {
        &self.bwd
    }

    /// The space of functions `fwd -> bwd` (utility functions on this object).
    pub fn utility_space(&self) -> Result<FnSpace> {
        FnSpace::new(self.fwd.len(), self.bwd.len())
    }
}

impl fmt::Display for LensObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({{{}}}, {{{}}})", self.fwd.labels().join(","), self.bwd.labels().join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LensMap {
    source: LensObject,
    target: LensObject,
    fwd: Vec<usize>,
    bwd: Vec<usize>,
}

impl LensMap {
    /// `fwd[x]` indexes `target.fwd`; `bwd[x * |target.bwd| + w]` indexes `source.bwd`.
    pub fn new(source: LensObject, target: LensObject, fwd: Vec<usize>, bwd: Vec<usize>) -> Result<Self> {
        let (nx, ny, nv, nw) = (source.fwd.len(), target.fwd.len(), source.bwd.len(), target.bwd.len());
        if fwd.len() != nx {
            return Err(Error::invalid(format!("forward table has {} entries, expected {nx}", fwd.len())));
        }
        if bwd.len() != nx * nw {
            return Err(Error::invalid(format!(
                "backward table has {} entries, expected {}",
                bwd.len(),
                nx * nw
            )));
        }
        if let Some(&y) = fwd.iter().find(|&&y| y >= ny) {
            return Err(Error::Membership(format!("forward image {y} outside target of size {ny}")));
        }
        if let Some(&v) = bwd.iter().find(|&&v| v >= nv) {
            return Err(Error::Membership(format!("backward image {v} outside source of size {nv}")));
        }
        Ok(LensMap { source, target, fwd, bwd })
    }

    pub fn source(&self) -> &LensObject {
        &self.source
    }

    pub fn target(&self) -> &LensObject {
        &self.target
    }

    pub fn forward(&self, x: usize) -> usize {
        self.fwd[x]
    }

    pub fn backward(&self, x: usize, w: usize) -> usize {
        self.bwd[x * self.target.bwd.len() + w]
    }

    pub fn forward_table(&self) -> &[usize] {
        &self.fwd
    }

    pub fn backward_table(&self) -> &[usize] {
        &self.bwd
    }

    /// For every utility function `k` on the target (by index), the index of
    /// `kα` on the source. Computed through [`precompose`].
    pub fn pullback_indices(&self) -> Result<Vec<usize>> {
        let target_space = self.target.utility_space()?;
        let source_space = self.source.utility_space()?;
        target_space
            .tables()
            .map(|k| precompose(&k, self).map(|ka| source_space.encode(ka.entries())))
            .collect()
    }
}

/// First `(x, w1, w2)` at which the backward map expands distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortnessViolation {
    pub x: String,
    pub w1: String,
    pub w2: String,
}

impl fmt::Display for ShortnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "backward map at x={} expands ({},{})", self.x, self.w1, self.w2)
    }
}

fn boundary(expected: &LensObject, found: &LensObject) -> Error {
    Error::BoundaryMismatch { expected: expected.to_string(), found: found.to_string() }
}

pub fn identity_lens(obj: &LensObject) -> LensMap {
    let (nx, nv) = (obj.fwd.len(), obj.bwd.len());
    LensMap {
        source: obj.clone(),
        target: obj.clone(),
        fwd: (0..nx).collect(),
        bwd: (0..nx).flat_map(|_| 0..nv).collect(),
    }
}

/// `g ∘ f`: forward `g0 ∘ f0`, backward `(x, t) ↦ f1(x, g1(f0 x, t))`.
pub fn compose_lens(g: &LensMap, f: &LensMap) -> Result<LensMap> {
    if f.target != g.source {
        return Err(boundary(&g.source, &f.target));
    }
    let nt = g.target.bwd.len();
    let nx = f.source.fwd.len();
    let fwd = (0..nx).map(|x| g.forward(f.forward(x))).collect();
    let bwd = (0..nx)
        .flat_map(|x| (0..nt).map(move |t| (x, t)))
        .map(|(x, t)| f.backward(x, g.backward(f.forward(x), t)))
        .collect();
    Ok(LensMap { source: f.source.clone(), target: g.target.clone(), fwd, bwd })
}

/// Componentwise product; objects combine with the max metric.
pub fn tensor_lens(f: &LensMap, g: &LensMap) -> LensMap {
    let source = f.source.tensor(&g.source);
    let target = f.target.tensor(&g.target);
    let (nx, nx2) = (f.source.fwd.len(), g.source.fwd.len());
    let ny2 = g.target.fwd.len();
    let (nw, nw2) = (f.target.bwd.len(), g.target.bwd.len());
    let nv2 = g.source.bwd.len();
    let mut fwd = Vec::with_capacity(nx * nx2);
    let mut bwd = Vec::with_capacity(nx * nx2 * nw * nw2);
    for x in 0..nx {
        for x2 in 0..nx2 {
            fwd.push(f.forward(x) * ny2 + g.forward(x2));
            for w in 0..nw {
                for w2 in 0..nw2 {
                    bwd.push(f.backward(x, w) * nv2 + g.backward(x2, w2));
                }
            }
        }
    }
    LensMap { source, target, fwd, bwd }
}

/// Checks `d(f1(x,w1), f1(x,w2)) <= d(w1,w2)` for every `x` and `w1 < w2`.
pub fn is_short_lens(m: &LensMap) -> Result<(), ShortnessViolation> {
    let (src, tgt) = (&m.source.bwd, &m.target.bwd);
    for x in 0..m.source.fwd.len() {
        for w1 in 0..tgt.len() {
            for w2 in w1 + 1..tgt.len() {
                if src.dist(m.backward(x, w1), m.backward(x, w2)) > tgt.dist(w1, w2) {
                    return Err(ShortnessViolation {
                        x: m.source.fwd.label(x).to_string(),
                        w1: tgt.label(w1).to_string(),
                        w2: tgt.label(w2).to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The lens `I -> obj` picking the element `x`.
pub fn point_of(x: usize, obj: &LensObject) -> Result<LensMap> {
    if x >= obj.fwd.len() {
        return Err(Error::Membership(format!("index {x} in {obj}")));
    }
    LensMap::new(LensObject::unit(), obj.clone(), vec![x], vec![0; obj.bwd.len()])
}

/// The lens `obj -> I` whose backward component is `k`.
pub fn costate_of(k: &FnTable, obj: &LensObject) -> Result<LensMap> {
    if k.domain_len() != obj.fwd.len() || k.codomain_len() != obj.bwd.len() {
        return Err(Error::DomainMismatch(format!(
            "utility table {} -> {} against object {obj}",
            k.domain_len(),
            k.codomain_len()
        )));
    }
    LensMap::new(obj.clone(), LensObject::unit(), vec![0; obj.fwd.len()], k.entries().to_vec())
}

/// `kα`: the utility function on `alpha.source` obtained by composing the
/// costate of `k` after `alpha`.
pub fn precompose(k: &FnTable, alpha: &LensMap) -> Result<FnTable> {
    let composite = compose_lens(&costate_of(k, &alpha.target)?, alpha)?;
    FnTable::new(composite.bwd, alpha.source.bwd.len())
}

/// Every lens map `source -> target`, forward table most significant.
pub fn all_lens_maps(source: &LensObject, target: &LensObject) -> Result<Vec<LensMap>> {
    let fwd_space = FnSpace::new(source.fwd.len(), target.fwd.len())?;
    let bwd_space = FnSpace::new(source.fwd.len() * target.bwd.len(), source.bwd.len())?;
    if fwd_space.count().saturating_mul(bwd_space.count()) > crate::metric::MAX_FUNCTIONS {
        return Err(Error::TooLarge(format!("lens maps {source} -> {target}")));
    }
    let mut out = Vec::with_capacity(fwd_space.count() * bwd_space.count());
    for f in 0..fwd_space.count() {
        for b in 0..bwd_space.count() {
            out.push(LensMap {
                source: source.clone(),
                target: target.clone(),
                fwd: fwd_space.decode(f),
                bwd: bwd_space.decode(b),
            });
        }
    }
    Ok(out)
}

/// Short lens maps only, same order as [`all_lens_maps`].
pub fn short_lens_maps(source: &LensObject, target: &LensObject) -> Result<Vec<LensMap>> {
    Ok(all_lens_maps(source, target)?.into_iter().filter(|m| is_short_lens(m).is_ok()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FinMetricSpace;

    fn obj(xs: &[&str], top: u64) -> LensObject {
        LensObject::new(FinMetricSpace::discrete(xs.iter().copied()).unwrap(), FinMetricSpace::grid(top)).unwrap()
    }

    #[test]
    fn identity_examples() {
        let o = obj(&["a", "b"], 1);
        let id = identity_lens(&o);
        assert_eq!(id.forward(0), 0);
        assert_eq!(id.backward(1, 1), 1);
        let m = LensMap::new(o.clone(), o.clone(), vec![1, 1], vec![0, 0, 1, 0]).unwrap();
        assert_eq!(compose_lens(&id, &m).unwrap(), m);
        assert_eq!(compose_lens(&m, &id).unwrap(), m);
        assert_eq!(compose_lens(&id, &id).unwrap(), id);
    }

    #[test]
    fn composing_identities_on_singletons() {
        let a = obj(&["a"], 1);
        let b = obj(&["b"], 1);
        let f = LensMap::new(a.clone(), b.clone(), vec![0], vec![0, 1]).unwrap();
        let g = LensMap::new(b.clone(), b.clone(), vec![0], vec![0, 1]).unwrap();
        let gf = compose_lens(&g, &f).unwrap();
        assert_eq!(gf.backward(0, 0), 0);
        assert_eq!(gf.backward(0, 1), 1);
    }

    #[test]
    fn compose_rejects_boundary_mismatch() {
        let a = obj(&["a"], 1);
        let b = obj(&["a", "b"], 1);
        let f = identity_lens(&a);
        let g = identity_lens(&b);
        assert!(matches!(compose_lens(&g, &f), Err(Error::BoundaryMismatch { .. })));
    }

    #[test]
    fn tensor_examples() {
        let o = obj(&["a", "b"], 1);
        let p = obj(&["c"], 2);
        assert_eq!(tensor_lens(&identity_lens(&o), &identity_lens(&p)), identity_lens(&o.tensor(&p)));

        let f = LensMap::new(o.clone(), o.clone(), vec![1, 0], vec![1, 0, 0, 0]).unwrap();
        let g = LensMap::new(p.clone(), p.clone(), vec![0], vec![2, 2, 0]).unwrap();
        let t = tensor_lens(&f, &g);
        // (x, x') = (a, c) -> (b, c)
        assert_eq!(t.forward(0), 1);
        // backward at ((a,c), (v=0, v'=1)) = (f1(a,0), g1(c,1)) = (1, 2), as product indices
        assert_eq!(t.backward(0, 1), 5);
    }

    #[test]
    fn shortness_examples() {
        let o = obj(&["x"], 2);
        assert!(is_short_lens(&identity_lens(&o)).is_ok());
        let constant = LensMap::new(o.clone(), o.clone(), vec![0], vec![1, 1, 1]).unwrap();
        assert!(is_short_lens(&constant).is_ok());
        let stretch = LensMap::new(o.clone(), o.clone(), vec![0], vec![0, 2, 2]).unwrap();
        assert_eq!(
            is_short_lens(&stretch),
            Err(ShortnessViolation { x: "x".into(), w1: "0".into(), w2: "1".into() })
        );
    }

    #[test]
    fn points_and_costates() {
        let o = obj(&["a", "b"], 2);
        let k = FnTable::new(vec![2, 0], 3).unwrap();
        for x in 0..2 {
            let scalar = compose_lens(&costate_of(&k, &o).unwrap(), &point_of(x, &o).unwrap()).unwrap();
            assert_eq!(scalar.forward(0), 0);
            assert_eq!(point_of(x, &o).unwrap().forward(0), x);
            assert_eq!(costate_of(&k, &o).unwrap().backward(x, 0), k.get(x));
        }
        assert_eq!(precompose(&k, &identity_lens(&o)).unwrap(), k);
        assert!(matches!(point_of(2, &o), Err(Error::Membership(_))));
    }

    #[test]
    fn precompose_unfolds_composition() {
        let a = obj(&["a"], 2);
        let ab = obj(&["a", "b"], 2);
        let alpha = LensMap::new(a.clone(), ab.clone(), vec![1], vec![0, 1, 2]).unwrap();
        let k = FnTable::new(vec![0, 2], 3).unwrap();
        assert_eq!(precompose(&k, &alpha).unwrap().entries(), &[2]);
    }

    #[test]
    fn enumerates_lens_maps() {
        let o = obj(&["a", "b"], 1);
        assert_eq!(all_lens_maps(&o, &o).unwrap().len(), 4 * 16);
        assert_eq!(short_lens_maps(&o, &o).unwrap().len(), 64);
        let g2 = obj(&["a"], 2);
        // f1: {0,1,2} -> {0,1,2} short iff 1-Lipschitz
        assert_eq!(short_lens_maps(&g2, &g2).unwrap().len(), 17);
    }
}
