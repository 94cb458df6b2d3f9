//! `agt/1` documents: JSON text with sorted keys and one entry per line.
//!
//! Every document has the shape
//! `{"body": ..., "kind": ..., "unit": ..., "version": "agt/1"}`.
//! Distances are integers of grid units (or the string `"inf"`); `unit` is a
//! decimal string used only when printing.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lens::{is_short_lens, LensMap, LensObject};
use crate::metric::{ExtReal, FinMetricSpace, FnTable, Subset};
use crate::opengame::OpenGame;
use crate::selection::{argmax_sel, eps_argmax_sel, nash_product, SelectionFunction};

pub const VERSION: &str = "agt/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDocument {
    pub unit: String,
    pub body: Body,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    MetricSpace(FinMetricSpace),
    Lens(LensMap),
    Selection(SelectionDoc),
    OpenGame(OpenGame),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::MetricSpace(_) => "metric-space",
            Body::Lens(_) => "lens",
            Body::Selection(_) => "selection",
            Body::OpenGame(_) => "open-game",
        }
    }
}

/// How a selection document states its function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Table,
    Argmax,
    EpsArgmax(ExtReal),
    Tensor(Box<SelectionDoc>, Box<SelectionDoc>),
}

/// A selection function, the rule it was written with, and the utility
/// functions to list when solving (all of them when empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionDoc {
    pub rule: Rule,
    pub function: SelectionFunction,
    pub queries: Vec<FnTable>,
}

impl SelectionDoc {
    pub fn table(function: SelectionFunction) -> Self {
        SelectionDoc { rule: Rule::Table, function, queries: Vec::new() }
    }

    pub fn argmax(object: &LensObject) -> Result<Self> {
        Ok(SelectionDoc { rule: Rule::Argmax, function: argmax_sel(object)?, queries: Vec::new() })
    }

    pub fn eps_argmax(object: &LensObject, eps: ExtReal) -> Result<Self> {
        Ok(SelectionDoc { rule: Rule::EpsArgmax(eps), function: eps_argmax_sel(object, eps)?, queries: Vec::new() })
    }

    pub fn tensor(left: SelectionDoc, right: SelectionDoc) -> Result<Self> {
        let function = nash_product(&left.function, &right.function)?;
        Ok(SelectionDoc {
            rule: Rule::Tensor(Box::new(SelectionDoc { queries: Vec::new(), ..left }), Box::new(SelectionDoc { queries: Vec::new(), ..right })),
            function,
            queries: Vec::new(),
        })
    }

    pub fn with_queries(mut self, queries: Vec<FnTable>) -> Self {
        self.queries = queries;
        self
    }
}

// ---------------------------------------------------------------- writing

pub fn serialize(doc: &SpecDocument) -> String {
    let value = json!({
        "body": body_value(&doc.body),
        "kind": doc.body.kind(),
        "unit": doc.unit,
        "version": VERSION,
    });
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth + 1);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            let _ = write!(out, "[{}]", parts.join(", "));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                let _ = write!(out, "{pad}{}: ", Value::from(key.as_str()));
                write_value(out, &map[key.as_str()], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn ext_value(e: ExtReal) -> Value {
    match e {
        ExtReal::Finite(n) => json!(n),
        ExtReal::Infinite => json!("inf"),
    }
}

pub fn space_value(s: &FinMetricSpace) -> Value {
    if let Some(top) = s.is_grid() {
        return json!({ "grid": top });
    }
    if s.is_discrete() {
        return json!({ "discrete": s.labels() });
    }
    let n = s.len();
    let dist: Vec<Value> = (0..n).map(|i| Value::Array((0..n).map(|j| ext_value(s.dist(i, j))).collect())).collect();
    let mut map = Map::new();
    map.insert("carrier".into(), json!(s.labels()));
    map.insert("dist".into(), Value::Array(dist));
    if let Some(lv) = s.levels() {
        map.insert("levels".into(), json!(lv));
    }
    Value::Object(map)
}

fn object_value(o: &LensObject) -> Value {
    json!({ "fwd": space_value(o.fwd()), "bwd": space_value(o.bwd()) })
}

fn backward_value(m: &LensMap) -> Value {
    let nw = m.target().bwd().len();
    let table = m.backward_table();
    Value::Array((0..m.source().fwd().len()).map(|x| json!(&table[x * nw..(x + 1) * nw])).collect())
}

fn forward_value(m: &LensMap) -> Value {
    json!(m.forward_table().iter().map(|&y| m.target().fwd().label(y)).collect::<Vec<_>>())
}

/// `k=[2,0]`: codomain indices in domain order.
pub fn k_key(k: &FnTable) -> String {
    format!("k={k}")
}

fn labels_of(set: Subset, space: &FinMetricSpace) -> Value {
    json!(set.iter().map(|x| space.label(x)).collect::<Vec<_>>())
}

fn selection_value(doc: &SelectionDoc) -> Value {
    let object = doc.function.object();
    let mut map = Map::new();
    match &doc.rule {
        Rule::Table => {
            let table: Map<String, Value> = doc
                .function
                .space()
                .tables()
                .map(|k| (k_key(&k), labels_of(doc.function.select(&k), object.fwd())))
                .collect();
            map.insert("object".into(), object_value(object));
            map.insert("table".into(), Value::Object(table));
        }
        Rule::Argmax => {
            map.insert("object".into(), object_value(object));
            map.insert("rule".into(), json!("argmax"));
        }
        Rule::EpsArgmax(eps) => {
            map.insert("object".into(), object_value(object));
            map.insert("rule".into(), json!({ "eps-argmax": ext_value(*eps) }));
        }
        Rule::Tensor(a, b) => {
            map.insert("rule".into(), json!({ "tensor": [selection_value(a), selection_value(b)] }));
        }
    }
    if !doc.queries.is_empty() {
        let bwd = object.bwd();
        let qs: Vec<Value> =
            doc.queries.iter().map(|k| json!(k.entries().iter().map(|&v| bwd.label(v)).collect::<Vec<_>>())).collect();
        map.insert("queries".into(), Value::Array(qs));
    }
    Value::Object(map)
}

fn game_value(g: &OpenGame) -> Value {
    let strategies: Vec<Value> = g
        .strategies()
        .iter()
        .enumerate()
        .map(|(sigma, name)| {
            let lens = g.lens(sigma);
            let eq: Map<String, Value> = g
                .space()
                .tables()
                .zip(g.equilibrium(sigma))
                .filter(|(_, set)| !set.is_empty())
                .map(|(k, set)| (k_key(&k), labels_of(*set, g.domain().fwd())))
                .collect();
            json!({
                "backward": backward_value(lens),
                "equilibrium": eq,
                "forward": forward_value(lens),
                "name": name,
            })
        })
        .collect();
    json!({
        "codomain": object_value(g.codomain()),
        "domain": object_value(g.domain()),
        "strategies": strategies,
    })
}

fn body_value(body: &Body) -> Value {
    match body {
        Body::MetricSpace(s) => space_value(s),
        Body::Lens(m) => json!({
            "backward": backward_value(m),
            "forward": forward_value(m),
            "source": object_value(m.source()),
            "target": object_value(m.target()),
        }),
        Body::Selection(doc) => selection_value(doc),
        Body::OpenGame(g) => game_value(g),
    }
}

// ---------------------------------------------------------------- reading

pub fn parse(text: &str) -> Result<SpecDocument> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Syntax { line: e.line(), message: e.to_string() })?;
    let root = Node { v: &value, path: String::new() };
    root.keys(&["body", "kind", "unit", "version"], &[])?;
    let version = root.get("version")?.str()?;
    if version != VERSION {
        return Err(root.get("version")?.err(format!("unsupported version {version:?}, expected {VERSION:?}")));
    }
    let unit_node = root.get("unit")?;
    let unit = unit_node.str()?.to_string();
    if !valid_unit(&unit) {
        return Err(unit_node.err(format!("unit {unit:?} is not a positive decimal")));
    }
    let kind_node = root.get("kind")?;
    let body = root.get("body")?;
    let body = match kind_node.str()? {
        "metric-space" => Body::MetricSpace(parse_space(&body)?),
        "lens" => Body::Lens(parse_lens(&body)?),
        "selection" => Body::Selection(parse_selection(&body)?),
        "open-game" => Body::OpenGame(parse_game(&body)?),
        other => return Err(kind_node.err(format!("unknown kind {other:?}"))),
    };
    Ok(SpecDocument { unit, body })
}

fn valid_unit(unit: &str) -> bool {
    parse_decimal(unit).is_some_and(|(m, _)| m > 0)
}

/// `"0.25"` as mantissa 25 and scale 2.
fn parse_decimal(s: &str) -> Option<(u128, usize)> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if s.contains('.') && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    digits.parse::<u128>().ok().map(|m| (m, frac.len()))
}

/// A distance in display units: `units × unit`, exact.
pub fn display_value(e: ExtReal, unit: &str) -> String {
    let ExtReal::Finite(n) = e else {
        return "inf".into();
    };
    let Some((m, scale)) = parse_decimal(unit) else {
        return n.to_string();
    };
    let digits = (m * u128::from(n)).to_string();
    if scale == 0 {
        return digits;
    }
    let padded = format!("{digits:0>width$}", width = scale + 1);
    let (int, frac) = padded.split_at(padded.len() - scale);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    }
}

struct Node<'a> {
    v: &'a Value,
    path: String,
}

impl<'a> Node<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        let path = if self.path.is_empty() { "document".to_string() } else { self.path.clone() };
        Error::Validation { path, message: message.into() }
    }

    fn wrap(&self, e: Error) -> Error {
        match e {
            Error::Validation { .. } | Error::Syntax { .. } => e,
            other => self.err(other.to_string()),
        }
    }

    fn child(&self, suffix: String, v: &'a Value) -> Node<'a> {
        Node { v, path: format!("{}{suffix}", self.path) }
    }

    fn object(&self) -> Result<&'a Map<String, Value>> {
        self.v.as_object().ok_or_else(|| self.err("expected an object"))
    }

    fn keys(&self, required: &[&str], optional: &[&str]) -> Result<()> {
        let map = self.object()?;
        for key in required {
            if !map.contains_key(*key) {
                return Err(self.err(format!("missing field {key:?}")));
            }
        }
        if let Some(extra) = map.keys().find(|k| !required.contains(&k.as_str()) && !optional.contains(&k.as_str())) {
            return Err(self.err(format!("unknown field {extra:?}")));
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<Node<'a>> {
        let sep = if self.path.is_empty() { "" } else { "." };
        match self.object()?.get(key) {
            Some(v) => Ok(self.child(format!("{sep}{key}"), v)),
            None => Err(self.err(format!("missing field {key:?}"))),
        }
    }

    fn opt(&self, key: &str) -> Result<Option<Node<'a>>> {
        self.object()?.contains_key(key).then(|| self.get(key)).transpose()
    }

    fn str(&self) -> Result<&'a str> {
        self.v.as_str().ok_or_else(|| self.err("expected a string"))
    }

    fn u64(&self) -> Result<u64> {
        self.v.as_u64().ok_or_else(|| self.err("expected a non-negative integer"))
    }

    fn ext(&self) -> Result<ExtReal> {
        match self.v {
            Value::String(s) if s == "inf" => Ok(ExtReal::INFINITY),
            _ => self.u64().map(ExtReal::Finite).map_err(|_| self.err("expected a non-negative integer or \"inf\"")),
        }
    }

    fn array(&self) -> Result<Vec<Node<'a>>> {
        let items = self.v.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(items.iter().enumerate().map(|(i, v)| self.child(format!("[{i}]"), v)).collect())
    }

    fn labels(&self) -> Result<Vec<String>> {
        self.array()?.iter().map(|n| n.str().map(str::to_string)).collect()
    }

    fn label_in(&self, space: &FinMetricSpace) -> Result<usize> {
        let label = self.str()?;
        space.index_of(label).ok_or_else(|| self.err(format!("unknown element {label:?}")))
    }

    fn subset_in(&self, space: &FinMetricSpace) -> Result<Subset> {
        let mut set = Subset::EMPTY;
        for item in self.array()? {
            let x = item.label_in(space)?;
            if set.contains(x) {
                return Err(item.err(format!("element {:?} listed twice", space.label(x))));
            }
            set.insert(x);
        }
        Ok(set)
    }
}

fn parse_space(node: &Node<'_>) -> Result<FinMetricSpace> {
    let map = node.object()?;
    if map.contains_key("grid") {
        node.keys(&["grid"], &[])?;
        let top_node = node.get("grid")?;
        let top = top_node.u64()?;
        if top > 63 {
            return Err(top_node.err(format!("grid of {} elements (limit 64)", top + 1)));
        }
        return Ok(FinMetricSpace::grid(top));
    }
    if map.contains_key("discrete") {
        node.keys(&["discrete"], &[])?;
        let labels_node = node.get("discrete")?;
        return FinMetricSpace::discrete(labels_node.labels()?).map_err(|e| labels_node.wrap(e));
    }
    node.keys(&["carrier", "dist"], &["levels"])?;
    let carrier = node.get("carrier")?;
    let labels = carrier.labels()?;
    let dist_node = node.get("dist")?;
    let rows = dist_node.array()?;
    if rows.len() != labels.len() {
        return Err(dist_node.err(format!("{} rows for {} carrier elements", rows.len(), labels.len())));
    }
    let mut dist = Vec::with_capacity(labels.len() * labels.len());
    for row in &rows {
        let cells = row.array()?;
        if cells.len() != labels.len() {
            return Err(row.err(format!("{} entries for {} carrier elements", cells.len(), labels.len())));
        }
        for cell in cells {
            dist.push(cell.ext()?);
        }
    }
    let levels = match node.opt("levels")? {
        Some(n) => Some(n.array()?.iter().map(Node::u64).collect::<Result<Vec<_>>>()?),
        None => None,
    };
    let space = FinMetricSpace::unchecked(labels, dist, levels).map_err(|e| node.wrap(e))?;
    if let Err(v) = crate::metric::validate_metric(&space)? {
        return Err(dist_node.err(format!("metric axiom violated: {v}")));
    }
    Ok(space)
}

fn parse_object(node: &Node<'_>) -> Result<LensObject> {
    node.keys(&["fwd", "bwd"], &[])?;
    let fwd = parse_space(&node.get("fwd")?)?;
    let bwd = parse_space(&node.get("bwd")?)?;
    LensObject::new(fwd, bwd).map_err(|e| node.wrap(e))
}

/// Forward labels and backward index rows of a lens `source -> target`.
fn parse_lens_tables(
    forward: &Node<'_>,
    backward: &Node<'_>,
    source: &LensObject,
    target: &LensObject,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let (nx, nw, nv) = (source.fwd().len(), target.bwd().len(), source.bwd().len());
    let fwd_items = forward.array()?;
    if fwd_items.len() != nx {
        return Err(forward.err(format!("{} entries, expected one per source element ({nx})", fwd_items.len())));
    }
    let fwd = fwd_items.iter().map(|n| n.label_in(target.fwd())).collect::<Result<Vec<_>>>()?;
    let rows = backward.array()?;
    if rows.len() != nx {
        return Err(backward.err(format!("{} rows, expected one per source element ({nx})", rows.len())));
    }
    let mut bwd = Vec::with_capacity(nx * nw);
    for row in &rows {
        let cells = row.array()?;
        if cells.len() != nw {
            return Err(row.err(format!("{} entries, expected one per target utility ({nw})", cells.len())));
        }
        for cell in cells {
            let v = cell.u64()? as usize;
            if v >= nv {
                return Err(cell.err(format!("index {v} outside source utilities (size {nv})")));
            }
            bwd.push(v);
        }
    }
    Ok((fwd, bwd))
}

fn parse_lens(node: &Node<'_>) -> Result<LensMap> {
    node.keys(&["source", "target", "forward", "backward"], &[])?;
    let source = parse_object(&node.get("source")?)?;
    let target = parse_object(&node.get("target")?)?;
    let (fwd, bwd) = parse_lens_tables(&node.get("forward")?, &node.get("backward")?, &source, &target)?;
    LensMap::new(source, target, fwd, bwd).map_err(|e| node.wrap(e))
}

fn parse_k_key(key: &str, space: crate::metric::FnSpace) -> Option<usize> {
    let inner = key.strip_prefix("k=[")?.strip_suffix(']')?;
    let entries: Vec<usize> = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|d| d.parse().ok()).collect::<Option<_>>()?
    };
    let k = FnTable::new(entries, space.codomain).ok()?;
    // reject non-canonical spellings such as "k=[ 1,0]" or "k=[01,0]"
    (k.domain_len() == space.domain && k_key(&k) == key).then(|| k.index())
}

/// A map from `k=[..]` keys (functions `domain -> codomain`) to lists of
/// `members` labels.
fn parse_k_table(
    node: &Node<'_>,
    domain: &FinMetricSpace,
    codomain: &FinMetricSpace,
    members: &FinMetricSpace,
    total: bool,
) -> Result<Vec<Subset>> {
    let space = crate::metric::FnSpace::new(domain.len(), codomain.len()).map_err(|e| node.wrap(e))?;
    let mut table = vec![Subset::EMPTY; space.count()];
    let mut seen = vec![false; space.count()];
    for (key, v) in node.object()? {
        let entry = node.child(format!(".{key:?}"), v);
        let idx = parse_k_key(key, space)
            .ok_or_else(|| entry.err(format!("not a utility function {}^{}", codomain.len(), domain.len())))?;
        table[idx] = entry.subset_in(members)?;
        seen[idx] = true;
    }
    if total {
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(node.err(format!("table is not total: no entry for {}", k_key(&space.table(missing)))));
        }
    }
    Ok(table)
}

fn parse_selection(node: &Node<'_>) -> Result<SelectionDoc> {
    let map = node.object()?;
    let mut doc = if map.contains_key("table") {
        node.keys(&["object", "table"], &["queries"])?;
        let object = parse_object(&node.get("object")?)?;
        let table = parse_k_table(&node.get("table")?, object.fwd(), object.bwd(), object.fwd(), true)?;
        SelectionDoc::table(SelectionFunction::new(object, table).map_err(|e| node.wrap(e))?)
    } else {
        let rule = node.get("rule")?;
        match rule.v {
            Value::String(s) if s == "argmax" => {
                node.keys(&["object", "rule"], &["queries"])?;
                let object = parse_object(&node.get("object")?)?;
                SelectionDoc::argmax(&object).map_err(|e| rule.wrap(e))?
            }
            Value::Object(m) if m.contains_key("eps-argmax") => {
                node.keys(&["object", "rule"], &["queries"])?;
                rule.keys(&["eps-argmax"], &[])?;
                let object = parse_object(&node.get("object")?)?;
                let eps = rule.get("eps-argmax")?.ext()?;
                SelectionDoc::eps_argmax(&object, eps).map_err(|e| rule.wrap(e))?
            }
            Value::Object(m) if m.contains_key("tensor") => {
                node.keys(&["rule"], &["queries"])?;
                rule.keys(&["tensor"], &[])?;
                let parts_node = rule.get("tensor")?;
                let parts = parts_node.array()?;
                if parts.len() != 2 {
                    return Err(parts_node.err("tensor takes exactly two selection bodies"));
                }
                let (a, b) = (parse_selection(&parts[0])?, parse_selection(&parts[1])?);
                if !a.queries.is_empty() || !b.queries.is_empty() {
                    return Err(parts_node.err("queries belong on the outer document"));
                }
                SelectionDoc::tensor(a, b).map_err(|e| parts_node.wrap(e))?
            }
            _ => return Err(rule.err("expected \"argmax\", {\"eps-argmax\": n} or {\"tensor\": [a, b]}")),
        }
    };
    if let Some(qs) = node.opt("queries")? {
        let object = doc.function.object().clone();
        let mut queries = Vec::new();
        for q in qs.array()? {
            let items = q.array()?;
            if items.len() != object.fwd().len() {
                return Err(q.err(format!("{} values, expected one per action ({})", items.len(), object.fwd().len())));
            }
            let entries = items.iter().map(|n| n.label_in(object.bwd())).collect::<Result<Vec<_>>>()?;
            queries.push(FnTable::new(entries, object.bwd().len())?);
        }
        if queries.is_empty() {
            return Err(qs.err("queries, when present, must be nonempty"));
        }
        doc = doc.with_queries(queries);
    }
    Ok(doc)
}

fn parse_game(node: &Node<'_>) -> Result<OpenGame> {
    node.keys(&["domain", "codomain", "strategies"], &[])?;
    let domain = parse_object(&node.get("domain")?)?;
    let codomain = parse_object(&node.get("codomain")?)?;
    let strategies_node = node.get("strategies")?;
    let (mut names, mut lenses, mut equilibria) = (Vec::new(), Vec::new(), Vec::new());
    for s in strategies_node.array()? {
        s.keys(&["name", "forward", "backward", "equilibrium"], &[])?;
        let name = s.get("name")?.str()?.to_string();
        if names.contains(&name) {
            return Err(s.err(format!("duplicate strategy {name:?}")));
        }
        let (fwd, bwd) = parse_lens_tables(&s.get("forward")?, &s.get("backward")?, &domain, &codomain)?;
        let lens = LensMap::new(domain.clone(), codomain.clone(), fwd, bwd).map_err(|e| s.wrap(e))?;
        if let Err(v) = is_short_lens(&lens) {
            return Err(s.get("backward")?.err(format!(
                "lens of strategy {name} is not short at (strategy={name}, x={}, r={}, r'={})",
                v.x, v.w1, v.w2
            )));
        }
        equilibria.push(parse_k_table(&s.get("equilibrium")?, codomain.fwd(), codomain.bwd(), domain.fwd(), false)?);
        names.push(name);
        lenses.push(lens);
    }
    OpenGame::new(domain, codomain, names, lenses, equilibria).map_err(|e| strategies_node.wrap(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(body: Body) -> SpecDocument {
        SpecDocument { unit: "1".into(), body }
    }

    #[test]
    fn discrete_space_round_trip() {
        let d = doc(Body::MetricSpace(FinMetricSpace::discrete(["a", "b"]).unwrap()));
        let text = serialize(&d);
        assert_eq!(
            text,
            "{\n  \"body\": {\n    \"discrete\": [\"a\", \"b\"]\n  },\n  \"kind\": \"metric-space\",\n  \"unit\": \"1\",\n  \"version\": \"agt/1\"\n}\n"
        );
        assert_eq!(parse(&text).unwrap(), d);
    }

    #[test]
    fn general_space_round_trip() {
        let s = FinMetricSpace::new(
            vec!["p".into(), "q".into(), "r".into()],
            vec![
                ExtReal::ZERO,
                ExtReal::units(2),
                ExtReal::INFINITY,
                ExtReal::units(2),
                ExtReal::ZERO,
                ExtReal::INFINITY,
                ExtReal::INFINITY,
                ExtReal::INFINITY,
                ExtReal::ZERO,
            ],
            Some(vec![5, 1, 3]),
        )
        .unwrap();
        let d = doc(Body::MetricSpace(s));
        let text = serialize(&d);
        assert!(text.contains("[0, 2, \"inf\"]"));
        assert_eq!(parse(&text).unwrap(), d);
    }

    #[test]
    fn asymmetric_table_is_rejected() {
        let text = r#"{"version":"agt/1","kind":"metric-space","unit":"1",
            "body":{"carrier":["a","b"],"dist":[[0,1],[2,0]]}}"#;
        let err = parse(text).unwrap_err();
        assert_eq!(err.to_string(), "body.dist: metric axiom violated: symmetry at (a,b)");
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse("{\n\"version\": \"agt/1\",\n oops }").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err}");
    }

    #[test]
    fn non_short_game_lens_is_named() {
        let text = r#"{"version":"agt/1","kind":"open-game","unit":"1","body":{
            "domain":{"fwd":{"discrete":["x"]},"bwd":{"grid":2}},
            "codomain":{"fwd":{"discrete":["x"]},"bwd":{"grid":2}},
            "strategies":[{"name":"s","forward":["x"],"backward":[[0,2,2]],"equilibrium":{}}]}}"#;
        let err = parse(text).unwrap_err();
        assert_eq!(
            err.to_string(),
            "body.strategies[0].backward: lens of strategy s is not short at (strategy=s, x=x, r=0, r'=1)"
        );
    }

    #[test]
    fn selection_table_must_be_total() {
        let text = r#"{"version":"agt/1","kind":"selection","unit":"1","body":{
            "object":{"fwd":{"discrete":["a"]},"bwd":{"grid":1}},
            "table":{"k=[0]":["a"]}}}"#;
        let err = parse(text).unwrap_err();
        assert_eq!(err.to_string(), "body.table: table is not total: no entry for k=[1]");
        let bad_key = text.replace("\"k=[0]\"", "\"k=[0 ]\"");
        assert!(parse(&bad_key).unwrap_err().to_string().contains("not a utility function"));
    }

    #[test]
    fn rule_documents_materialize() {
        let text = r#"{"version":"agt/1","kind":"selection","unit":"0.5","body":{
            "object":{"fwd":{"discrete":["a","b"]},"bwd":{"grid":2}},
            "rule":"argmax","queries":[["2","0"]]}}"#;
        let d = parse(text).unwrap();
        let Body::Selection(sel) = &d.body else { panic!() };
        let o = sel.function.object().clone();
        assert_eq!(sel.function, argmax_sel(&o).unwrap());
        assert_eq!(sel.queries, vec![FnTable::new(vec![2, 0], 3).unwrap()]);
        assert_eq!(parse(&serialize(&d)).unwrap(), d);
    }

    #[test]
    fn display_scaling() {
        assert_eq!(display_value(ExtReal::units(3), "1"), "3");
        assert_eq!(display_value(ExtReal::units(3), "0.5"), "1.5");
        assert_eq!(display_value(ExtReal::units(4), "0.25"), "1");
        assert_eq!(display_value(ExtReal::units(1), "0.05"), "0.05");
        assert_eq!(display_value(ExtReal::INFINITY, "2"), "inf");
        assert!(!valid_unit("0"));
        assert!(!valid_unit("1."));
        assert!(!valid_unit("-1"));
    }
}
