//! JSON interchange for fans, functions and function pairs.
//!
//! Output is compact with sorted keys, so serializing a parsed canonical
//! document reproduces it byte for byte. Integers are written as plain JSON
//! numbers of any length.

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::classify1d::{CanonicalPartition, Gallery1D, MinimalModel};
use crate::classify2d::{
    AssembledCycle, AssemblyReport, ConventionPair, Gallery2D, PlaneCandidate, Profile, Provenance, SideTable,
};
use crate::fan::{BalanceReport, WeightedFan};
use crate::lattice::{IntMatrix, LatticeVector, LinearFunctional};
use crate::scalar::Scalar;
use crate::trop::{Binomial, Curve, TrFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema { field: field.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Divide non-primitive rays by their content instead of rejecting them.
    pub normalize_rays: bool,
}

pub fn parse_value(text: &str) -> Result<Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Compact serialization with sorted keys.
pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("values always serialize")
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| schema(field, "expected an object"))
}

fn member<'a>(m: &'a Map<String, Value>, key: &str, field: &str) -> Result<&'a Value, IoError> {
    m.get(key).ok_or_else(|| schema(format!("{field}.{key}"), "missing field"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| schema(field, "expected an array"))
}

fn integer<S: Scalar>(v: &Value, field: &str) -> Result<S, IoError> {
    let Value::Number(n) = v else { return Err(schema(field, "expected an integer")) };
    let text = n.to_string();
    S::parse_decimal(&text).ok_or_else(|| schema(field, format!("{text} is not an integer")))
}

fn index(v: &Value, field: &str) -> Result<usize, IoError> {
    v.as_u64().and_then(|x| usize::try_from(x).ok()).ok_or_else(|| schema(field, "expected a non-negative index"))
}

fn int_vec<S: Scalar>(v: &Value, field: &str) -> Result<Vec<S>, IoError> {
    array(v, field)?.iter().enumerate().map(|(i, x)| integer(x, &format!("{field}[{i}]"))).collect()
}

pub fn int_value<S: Scalar>(x: &S) -> Value {
    let n: Number = serde_json::from_str(&x.to_string()).expect("decimal integers are JSON numbers");
    Value::Number(n)
}

fn coords_value<S: Scalar>(c: &[S]) -> Value {
    Value::Array(c.iter().map(int_value).collect())
}

pub fn vector_value<S: Scalar>(v: &LatticeVector<S>) -> Value {
    coords_value(v.coords())
}

pub fn functional_value<S: Scalar>(l: &LinearFunctional<S>) -> Value {
    coords_value(l.coords())
}

pub fn matrix_value<S: Scalar>(m: &IntMatrix<S>) -> Value {
    Value::Array(m.rows().iter().map(|r| coords_value(r)).collect())
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn usizes(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::from(x)).collect())
}

/// `{"cones": [[i, j], ...], "n": n, "rays": [[...], ...], "weights": [...]}`.
pub fn parse_fan<S: Scalar>(text: &str, opts: ParseOptions) -> Result<WeightedFan<S>, IoError> {
    fan_from_value(&parse_value(text)?, opts)
}

pub fn fan_from_value<S: Scalar>(v: &Value, opts: ParseOptions) -> Result<WeightedFan<S>, IoError> {
    let m = object(v, "fan")?;
    let n = index(member(m, "n", "fan")?, "fan.n")?;
    if n == 0 {
        return Err(schema("fan.n", "ambient dimension must be positive"));
    }
    let mut rays = Vec::new();
    for (i, r) in array(member(m, "rays", "fan")?, "fan.rays")?.iter().enumerate() {
        let field = format!("fan.rays[{i}]");
        let coords: Vec<S> = int_vec(r, &field)?;
        if coords.len() != n {
            return Err(schema(field, format!("expected {n} coordinates, found {}", coords.len())));
        }
        let ray = LatticeVector::new(coords);
        if ray.is_zero() {
            return Err(schema(field, "zero ray"));
        }
        if !ray.is_primitive() {
            if !opts.normalize_rays {
                return Err(schema(field, format!("non-primitive ray {ray}")));
            }
            rays.push(ray.primitive().expect("nonzero"));
        } else {
            rays.push(ray);
        }
    }
    let mut cones = Vec::new();
    for (i, c) in array(member(m, "cones", "fan")?, "fan.cones")?.iter().enumerate() {
        let field = format!("fan.cones[{i}]");
        let idx: Vec<usize> = array(c, &field)?
            .iter()
            .enumerate()
            .map(|(j, x)| index(x, &format!("{field}[{j}]")))
            .collect::<Result<_, _>>()?;
        cones.push(idx);
    }
    let weights: Vec<S> = int_vec(member(m, "weights", "fan")?, "fan.weights")?;
    if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
        return Err(schema(format!("fan.weights[{i}]"), "weights must be positive"));
    }
    WeightedFan::new(n, rays, cones, weights).map_err(|e| schema("fan", e.to_string()))
}

pub fn fan_value<S: Scalar>(fan: &WeightedFan<S>) -> Value {
    let cones: Vec<Value> = fan.facets().iter().chain(fan.extra_cones()).map(|c| usizes(c)).collect();
    obj(vec![
        ("cones", Value::Array(cones)),
        ("n", Value::from(fan.ambient_dim())),
        ("rays", Value::Array(fan.rays().iter().map(vector_value).collect())),
        ("weights", Value::Array(fan.weights().iter().map(int_value).collect())),
    ])
}

/// `{"functionals": [[...], ...]}`.
pub fn parse_function<S: Scalar>(text: &str) -> Result<TrFunction<S>, IoError> {
    function_from_value(&parse_value(text)?, "function")
}

pub fn function_from_value<S: Scalar>(v: &Value, field: &str) -> Result<TrFunction<S>, IoError> {
    let m = object(v, field)?;
    let list = array(member(m, "functionals", field)?, &format!("{field}.functionals"))?;
    let fs: Vec<LinearFunctional<S>> = list
        .iter()
        .enumerate()
        .map(|(i, x)| int_vec(x, &format!("{field}.functionals[{i}]")).map(LinearFunctional::new))
        .collect::<Result<_, _>>()?;
    TrFunction::new(fs).map_err(|e| schema(format!("{field}.functionals"), e.to_string()))
}

pub fn function_value<S: Scalar>(t: &TrFunction<S>) -> Value {
    obj(vec![("functionals", Value::Array(t.functionals().iter().map(functional_value).collect()))])
}

/// `{"t1": function, "t2": function}`.
pub fn parse_pair<S: Scalar>(text: &str) -> Result<ConventionPair<S>, IoError> {
    pair_from_value(&parse_value(text)?)
}

pub fn pair_from_value<S: Scalar>(v: &Value) -> Result<ConventionPair<S>, IoError> {
    let m = object(v, "pair")?;
    let t1 = function_from_value(member(m, "t1", "pair")?, "pair.t1")?;
    let t2 = function_from_value(member(m, "t2", "pair")?, "pair.t2")?;
    ConventionPair::new(t1, t2).map_err(|e| schema("pair", e.to_string()))
}

pub fn pair_value<S: Scalar>(p: &ConventionPair<S>) -> Value {
    obj(vec![("t1", function_value(p.t1())), ("t2", function_value(p.t2()))])
}

/// Any of the three document kinds, recognized by its keys.
#[derive(Clone, Debug)]
pub enum Document<S> {
    Fan(WeightedFan<S>),
    Function(TrFunction<S>),
    Pair(ConventionPair<S>),
}

pub fn parse_document<S: Scalar>(text: &str, opts: ParseOptions) -> Result<Document<S>, IoError> {
    let v = parse_value(text)?;
    let m = object(&v, "document")?;
    if m.contains_key("rays") {
        Ok(Document::Fan(fan_from_value(&v, opts)?))
    } else if m.contains_key("functionals") {
        Ok(Document::Function(function_from_value(&v, "function")?))
    } else if m.contains_key("t1") {
        Ok(Document::Pair(pair_from_value(&v)?))
    } else {
        Err(schema("document", "expected a fan, a function or a pair"))
    }
}

pub fn profile_value<S: Scalar>(p: &Profile<S>) -> Value {
    Value::Array(vec![int_value(&p.t11), int_value(&p.t12), int_value(&p.t22)])
}

fn side_value(t: &SideTable) -> Value {
    obj(vec![
        ("delta", usizes(&t.delta)),
        ("hot", Value::from(t.hot + 1)),
        ("parts", Value::Array(t.parts.iter().map(|p| usizes(p)).collect())),
    ])
}

pub fn provenance_value(p: &Provenance) -> Value {
    match p {
        Provenance::Case1 { a, b } => obj(vec![("a", usizes(a)), ("b", usizes(b)), ("branch", "case1".into())]),
        Provenance::Case2 { swapped, bergman_side, other_side } => obj(vec![
            ("bergman_side", side_value(bergman_side)),
            ("branch", "case2".into()),
            ("other_side", side_value(other_side)),
            ("swapped", Value::Bool(*swapped)),
        ]),
        Provenance::SelfBergman { swapped, bergman_side } => obj(vec![
            ("bergman_side", side_value(bergman_side)),
            ("branch", "lemma47a".into()),
            ("swapped", Value::Bool(*swapped)),
        ]),
    }
}

pub fn candidate_value<S: Scalar>(c: &PlaneCandidate<S>) -> Value {
    obj(vec![
        ("basis", Value::Array(c.plane.basis().iter().map(vector_value).collect())),
        ("generators", Value::Array(c.generators.iter().map(vector_value).collect())),
        ("profile", profile_value(&c.profile)),
        ("provenance", provenance_value(&c.provenance)),
    ])
}

pub fn binomial_value<S: Scalar>(b: &Binomial<S>) -> Value {
    Value::Array(vec![functional_value(&b.l), functional_value(&b.h)])
}

pub fn gallery2d_value<S: Scalar>(g: &Gallery2D<S>) -> Value {
    obj(vec![("facets", usizes(&g.facets)), ("l1", binomial_value(&g.l1)), ("l2", binomial_value(&g.l2))])
}

pub fn cycle_value<S: Scalar>(c: &AssembledCycle<S>) -> Value {
    let coverage: Vec<Value> = c
        .coverage
        .iter()
        .map(|x| obj(vec![("facet", Value::from(x.facet)), ("pair", x.pair.map_or(Value::Null, Value::from))]))
        .collect();
    let bounds: Vec<Value> = c
        .facet_bounds
        .facets
        .iter()
        .map(|b| {
            obj(vec![
                ("facet", Value::from(b.facet)),
                ("holds", Value::Bool(b.holds)),
                ("profile", profile_value(&b.profile)),
            ])
        })
        .collect();
    obj(vec![
        ("coverage", Value::Array(coverage)),
        ("facet_bounds", Value::Array(bounds)),
        ("fan", fan_value(&c.fan)),
        ("galleries", Value::Array(c.galleries.iter().map(gallery2d_value).collect())),
        ("planes", usizes(&c.planes)),
        ("profile", profile_value(&c.profile)),
    ])
}

pub fn assembly_value<S: Scalar>(r: &AssemblyReport<S>) -> Value {
    obj(vec![
        ("balanced_found", Value::from(r.balanced_found)),
        ("cycles", Value::Array(r.cycles.iter().map(cycle_value).collect())),
        ("hodge_counterexamples", Value::Array(r.hodge_counterexamples.iter().map(cycle_value).collect())),
        ("planes", Value::Array(r.planes.iter().map(candidate_value).collect())),
        ("subsets_examined", Value::from(r.subsets_examined)),
    ])
}

pub fn gallery1d_value<S: Scalar>(g: &Gallery1D<S>) -> Value {
    obj(vec![("a", Value::from(g.a)), ("b", Value::from(g.b)), ("l", functional_value(&g.l))])
}

pub fn partition_value<S: Scalar>(p: &CanonicalPartition<S>) -> Value {
    obj(vec![
        ("classes", Value::Array(p.classes.iter().map(|c| usizes(c)).collect())),
        (
            "galleries",
            Value::Array(
                p.class_galleries.iter().map(|gs| Value::Array(gs.iter().map(gallery1d_value).collect())).collect(),
            ),
        ),
        ("nongallery", usizes(&p.nongallery)),
    ])
}

pub fn model_value<S: Scalar>(m: &MinimalModel<S>) -> Value {
    let blocks: Vec<Value> = m.class_blocks.iter().map(|r| Value::Array(vec![r.start.into(), r.end.into()])).collect();
    obj(vec![
        ("bergman_groups", Value::Array(m.decomposition.groups.iter().map(|g| usizes(g)).collect())),
        ("class_blocks", Value::Array(blocks)),
        ("image", fan_value(&m.image)),
        ("matrix", matrix_value(&m.matrix)),
        ("partition", partition_value(&m.partition)),
        ("section", matrix_value(&m.section)),
    ])
}

/// A weighted 1-cycle as parallel `rays` and `weights` arrays, in ray order.
pub fn curve_value<S: Scalar>(c: &Curve<S>) -> Value {
    obj(vec![
        ("rays", Value::Array(c.keys().map(vector_value).collect())),
        ("weights", Value::Array(c.values().map(int_value).collect())),
    ])
}

pub fn balance_value<S: Scalar>(r: &BalanceReport<S>) -> Value {
    let faces: Vec<Value> = r
        .faces
        .iter()
        .map(|f| {
            obj(vec![
                ("balanced", Value::Bool(f.balanced)),
                ("face", Value::String(f.face.to_string())),
                ("sum", vector_value(&f.sum)),
            ])
        })
        .collect();
    obj(vec![("balanced", Value::Bool(r.is_balanced())), ("faces", Value::Array(faces))])
}
