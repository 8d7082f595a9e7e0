//! Metric charts: four coordinates, a signature, an orientation and ten
//! coefficient expressions for the symmetric `g_ij`.
//!
//! Chart documents are line oriented:
//!
//! ```text
//! # comment
//! coords = [r, x, y, z]
//! signature = "riemannian"
//! orientation = 1
//! domain = "x > 0"
//!
//! [metric]
//! g_rr = "(2*x)^3"
//! g_xx = "1"
//! g_yy = "(2*x)^(-3)"
//! g_zz = "1"
//! ```
//!
//! Off-diagonal entries default to zero; every diagonal entry is required.
//! Entry names are `g_<a><b>` or `g_<a>_<b>` with coordinate names `a`, `b`.

use std::fmt::Write as _;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rand::Rng;

use crate::bivector::MetricKind;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, BinOp, Expr, Func};

/// `g`, `∂_k g_ij` and `∂_k ∂_l g_ij` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJets {
    pub g: Matrix4<f64>,
    /// `dg[k][i][j] = ∂_k g_ij`
    pub dg: [[[f64; 4]; 4]; 4],
    /// `ddg[k][l][i][j] = ∂_k ∂_l g_ij`
    pub ddg: [[[[f64; 4]; 4]; 4]; 4],
}

/// Unit-length requirement carried by a bridged chart.
#[derive(Debug, Clone, PartialEq)]
struct UnitConstraint {
    source: Box<MetricChart>,
    vector: [Expr; 4],
    expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricChart {
    name: Option<String>,
    coords: [String; 4],
    kind: MetricKind,
    orientation: i8,
    /// Upper triangle, row-major: (0,0) (0,1) (0,2) (0,3) (1,1) ... (3,3).
    components: [Expr; 10],
    domain: Option<String>,
    unit: Option<UnitConstraint>,
}

fn tri_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // offsets of row starts in the packed upper triangle
    const START: [usize; 4] = [0, 4, 7, 9];
    START[i] + (j - i)
}

const RESERVED: [&str; 1] = ["pi"];

impl MetricChart {
    pub fn new(
        coords: [String; 4],
        kind: MetricKind,
        orientation: i8,
        components: [Expr; 10],
    ) -> Result<MetricChart> {
        validate_coords(&coords, 0)?;
        if orientation != 1 && orientation != -1 {
            return Err(Error::Chart(format!("orientation must be 1 or -1, got {orientation}")));
        }
        Ok(MetricChart {
            name: None,
            coords,
            kind,
            orientation,
            components,
            domain: None,
            unit: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_domain(mut self, domain: impl Into<String>) -> Self {
        self.domain = Some(domain.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn coords(&self) -> &[String; 4] {
        &self.coords
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn domain(&self) -> Option<&str> {
        self.domain.as_deref()
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[tri_index(i, j)]
    }

    /// Parses an expression in this chart's coordinates.
    pub fn parse_expr(&self, text: &str) -> Result<Expr> {
        parse_expr(text, &self.coords).map_err(|e| e.located(1, 1))
    }

    /// Parses a comma-separated list of four component expressions.
    pub fn parse_vector(&self, text: &str) -> Result<[Expr; 4]> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Chart(format!(
                "vector needs 4 comma-separated components, got {}",
                parts.len()
            )));
        }
        let mut out = Vec::with_capacity(4);
        let mut column = 1;
        for part in parts {
            out.push(parse_expr(part, &self.coords).map_err(|e| e.located(1, column))?);
            column += part.chars().count() + 1;
        }
        Ok(out.try_into().expect("four components"))
    }

    /// Evaluates `g` only.
    pub fn metric_at(&self, p: &[f64; 4]) -> Result<Matrix4<f64>> {
        let mut g = Matrix4::zeros();
        for i in 0..4 {
            for j in i..4 {
                let v = self.component(i, j).eval(p)?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        self.check_metric(&g)?;
        self.check_unit(p)?;
        Ok(g)
    }

    /// `g`, `∂g`, `∂²g` at `p` by second-order forward differentiation.
    pub fn metric_jets(&self, p: &[f64; 4]) -> Result<MetricJets> {
        let mut jets = MetricJets {
            g: Matrix4::zeros(),
            dg: [[[0.0; 4]; 4]; 4],
            ddg: [[[[0.0; 4]; 4]; 4]; 4],
        };
        for i in 0..4 {
            for j in i..4 {
                let jet = self.component(i, j).eval_jet(p)?;
                jets.g[(i, j)] = jet.value;
                jets.g[(j, i)] = jet.value;
                for k in 0..4 {
                    jets.dg[k][i][j] = jet.grad[k];
                    jets.dg[k][j][i] = jet.grad[k];
                    for l in 0..4 {
                        jets.ddg[k][l][i][j] = jet.hess[k][l];
                        jets.ddg[k][l][j][i] = jet.hess[k][l];
                    }
                }
            }
        }
        self.check_metric(&jets.g)?;
        self.check_unit(p)?;
        Ok(jets)
    }

    fn check_metric(&self, g: &Matrix4<f64>) -> Result<()> {
        let det = g.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::SingularMetric { det });
        }
        check_signature(g, self.kind)
    }

    fn check_unit(&self, p: &[f64; 4]) -> Result<()> {
        let Some(unit) = &self.unit else {
            return Ok(());
        };
        let g = unit.source.metric_at(p)?;
        let t = eval_vector(&unit.vector, p)?;
        let norm = t.dot(&(g * t));
        if (norm - unit.expected).abs() > 1e-9 {
            return Err(Error::NonUnitVector { norm });
        }
        Ok(())
    }

    /// Serialises to the chart document format.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "# {name}");
        }
        let _ = writeln!(out, "coords = [{}]", self.coords.join(", "));
        let _ = writeln!(out, "signature = \"{}\"", self.kind.name());
        let _ = writeln!(out, "orientation = {}", self.orientation);
        if let Some(d) = &self.domain {
            let _ = writeln!(out, "domain = \"{d}\"");
        }
        let _ = writeln!(out, "\n[metric]");
        for i in 0..4 {
            for j in i..4 {
                let e = self.component(i, j);
                if i != j && e.is_zero_literal() {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "g_{}_{} = \"{}\"",
                    self.coords[i],
                    self.coords[j],
                    e.display(&self.coords)
                );
            }
        }
        out
    }

    /// Multiplies every coefficient by `exp(2 f)`.
    pub fn conformal_rescale(&self, f: &Expr) -> MetricChart {
        let factor = Expr::call(Func::Exp, mul(Expr::num(2.0), f.clone()));
        let components = self.components.clone().map(|c| {
            if c.is_zero_literal() {
                c
            } else {
                mul(factor.clone(), c)
            }
        });
        MetricChart {
            name: self.name.as_ref().map(|n| format!("{n} (conformally rescaled)")),
            components,
            unit: None,
            ..self.clone()
        }
    }
}

fn validate_coords(coords: &[String; 4], line: usize) -> Result<()> {
    for (i, c) in coords.iter().enumerate() {
        let ok = c.chars().next().is_some_and(|ch| ch.is_alphabetic() || ch == '_')
            && c.chars().all(|ch| ch.is_alphanumeric() || ch == '_');
        if !ok || Func::from_name(c).is_some() || RESERVED.contains(&c.as_str()) {
            return Err(Error::Chart(format!("line {line}: invalid coordinate name `{c}`")));
        }
        if coords[..i].contains(c) {
            return Err(Error::Chart(format!("line {line}: duplicate coordinate `{c}`")));
        }
    }
    Ok(())
}

/// Checks the eigenvalue sign count of a symmetric matrix against a kind.
pub fn check_signature(g: &Matrix4<f64>, kind: MetricKind) -> Result<()> {
    let eig = SymmetricEigen::new(*g);
    let negative = eig.eigenvalues.iter().filter(|&&v| v < 0.0).count();
    let expected = match kind {
        MetricKind::Riemannian => 0,
        MetricKind::Lorentzian => 1,
    };
    if negative != expected {
        return Err(Error::SignatureMismatch { expected: kind });
    }
    Ok(())
}

pub fn eval_vector(v: &[Expr; 4], p: &[f64; 4]) -> Result<Vector4<f64>> {
    Ok(Vector4::new(v[0].eval(p)?, v[1].eval(p)?, v[2].eval(p)?, v[3].eval(p)?))
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Mul, a, b)
}

fn sum(terms: Vec<Expr>) -> Expr {
    let mut it = terms.into_iter().filter(|t| !t.is_zero_literal());
    match it.next() {
        None => Expr::num(0.0),
        Some(first) => it.fold(first, |acc, t| Expr::bin(BinOp::Add, acc, t)),
    }
}

/// The signature-flipped partner `g ∓ 2 T♭⊗T♭`.
///
/// A Riemannian chart with `g(T,T) = 1` gives the Lorentzian
/// `g − 2T♭⊗T♭`; a Lorentzian chart with `g(T,T) = −1` gives the Riemannian
/// `g + 2T♭⊗T♭`. The unit condition is checked whenever the result is
/// evaluated.
pub fn bridge_metric(chart: &MetricChart, t: &[Expr; 4]) -> MetricChart {
    let (sign, expected) = match chart.kind {
        MetricKind::Riemannian => (-2.0, 1.0),
        MetricKind::Lorentzian => (2.0, -1.0),
    };
    let flat: Vec<Expr> = (0..4)
        .map(|i| {
            sum((0..4)
                .filter(|&k| !chart.component(i, k).is_zero_literal() && !t[k].is_zero_literal())
                .map(|k| mul(chart.component(i, k).clone(), t[k].clone()))
                .collect())
        })
        .collect();
    let mut components = Vec::with_capacity(10);
    for i in 0..4 {
        for j in i..4 {
            let base = chart.component(i, j).clone();
            let comp = if flat[i].is_zero_literal() || flat[j].is_zero_literal() {
                base
            } else {
                let correction = mul(Expr::num(sign), mul(flat[i].clone(), flat[j].clone()));
                if base.is_zero_literal() {
                    correction
                } else {
                    Expr::bin(BinOp::Add, base, correction)
                }
            };
            components.push(comp);
        }
    }
    MetricChart {
        name: chart.name.as_ref().map(|n| format!("{n} (bridged)")),
        coords: chart.coords.clone(),
        kind: chart.kind.flipped(),
        orientation: chart.orientation,
        components: components.try_into().expect("ten components"),
        domain: chart.domain.clone(),
        unit: Some(UnitConstraint {
            source: Box::new(chart.clone()),
            vector: t.clone(),
            expected,
        }),
    }
}

/// Pointwise bridge on matrices: `g ∓ 2 (gT)(gT)ᵀ`.
pub fn bridge_matrix(g: &Matrix4<f64>, t: &Vector4<f64>, kind: MetricKind) -> Result<Matrix4<f64>> {
    let (sign, expected) = match kind {
        MetricKind::Riemannian => (-2.0, 1.0),
        MetricKind::Lorentzian => (2.0, -1.0),
    };
    let norm = t.dot(&(g * t));
    if (norm - expected).abs() > 1e-9 {
        return Err(Error::NonUnitVector { norm });
    }
    let flat = g * t;
    Ok(g + sign * flat * flat.transpose())
}

// ---------------------------------------------------------------------------
// Document parsing

#[derive(Debug)]
enum Value {
    Str(String, usize),
    Int(i64),
    List(Vec<String>),
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_value(raw: &str, line: usize, value_col: usize) -> Result<Value> {
    let t = raw.trim();
    let lead = raw.len() - raw.trim_start().len();
    if let Some(rest) = t.strip_prefix('"') {
        let Some(inner) = rest.strip_suffix('"') else {
            return Err(Error::Syntax {
                line,
                column: value_col + lead,
                message: "unterminated string".into(),
            });
        };
        return Ok(Value::Str(inner.to_string(), value_col + lead + 1));
    }
    if let Some(rest) = t.strip_prefix('[') {
        let Some(inner) = rest.strip_suffix(']') else {
            return Err(Error::Syntax {
                line,
                column: value_col + lead,
                message: "unterminated list".into(),
            });
        };
        let items = inner
            .split(',')
            .map(|s| s.trim().trim_matches('"').to_string())
            .filter(|s| !s.is_empty())
            .collect();
        return Ok(Value::List(items));
    }
    t.parse::<i64>().map(Value::Int).map_err(|_| Error::Syntax {
        line,
        column: value_col + lead,
        message: format!("expected a string, integer or list, found `{t}`"),
    })
}

fn resolve_entry(key: &str, coords: &[String; 4]) -> Option<(usize, usize)> {
    let rest = key.strip_prefix("g_")?;
    let find = |s: &str| coords.iter().position(|c| c == s);
    if let Some((a, b)) = rest.split_once('_') {
        if let (Some(i), Some(j)) = (find(a), find(b)) {
            return Some((i, j));
        }
    }
    for (split, _) in rest.char_indices().skip(1) {
        if let (Some(i), Some(j)) = (find(&rest[..split]), find(&rest[split..])) {
            return Some((i, j));
        }
    }
    None
}

/// Parses a chart document.
pub fn parse_metric(text: &str) -> Result<MetricChart> {
    let mut coords: Option<[String; 4]> = None;
    let mut kind = None;
    let mut orientation: i8 = 1;
    let mut domain = None;
    let mut name = None;
    let mut in_metric = false;
    let mut entries: Vec<(usize, String, String, usize)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw_line);
        if line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim();
        if trimmed.starts_with('[') && !trimmed.contains('=') {
            if trimmed == "[metric]" {
                in_metric = true;
                continue;
            }
            return Err(Error::Chart(format!("line {line_no}: unknown section {trimmed}")));
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Syntax {
                line: line_no,
                column: line.len() - line.trim_start().len() + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = line[..eq].trim().to_string();
        let value_col = line[..eq + 1].chars().count() + 1;
        let value = parse_value(&line[eq + 1..], line_no, value_col)?;
        if in_metric {
            match value {
                Value::Str(s, col) => entries.push((line_no, key, s, col)),
                _ => {
                    return Err(Error::Chart(format!(
                        "line {line_no}: metric entry `{key}` must be a quoted expression"
                    )))
                }
            }
            continue;
        }
        match (key.as_str(), value) {
            ("coords", Value::List(items)) => {
                let arr: [String; 4] = items.try_into().map_err(|items: Vec<String>| {
                    Error::Chart(format!(
                        "line {line_no}: expected 4 coordinates, got {}",
                        items.len()
                    ))
                })?;
                validate_coords(&arr, line_no)?;
                coords = Some(arr);
            }
            ("signature", Value::Str(s, _)) => {
                kind = Some(match s.as_str() {
                    "riemannian" => MetricKind::Riemannian,
                    "lorentzian" => MetricKind::Lorentzian,
                    other => {
                        return Err(Error::Chart(format!(
                            "line {line_no}: unknown signature `{other}`"
                        )))
                    }
                });
            }
            ("orientation", Value::Int(o)) if o == 1 || o == -1 => orientation = o as i8,
            ("domain", Value::Str(s, _)) => domain = Some(s),
            ("name", Value::Str(s, _)) => name = Some(s),
            (k, v) => {
                return Err(Error::Chart(format!(
                    "line {line_no}: unexpected entry `{k}` = {v:?}"
                )))
            }
        }
    }

    let coords = coords.ok_or_else(|| Error::Chart("missing `coords`".into()))?;
    let kind = kind.ok_or_else(|| Error::Chart("missing `signature`".into()))?;
    let mut comps: [Option<(Expr, String)>; 10] = Default::default();
    for (line_no, key, text, col) in entries {
        let (i, j) = resolve_entry(&key, &coords).ok_or_else(|| {
            Error::Chart(format!("line {line_no}: `{key}` does not name a metric entry"))
        })?;
        let expr = parse_expr(&text, &coords).map_err(|e| e.located(line_no, col))?;
        let slot = &mut comps[tri_index(i, j)];
        if let Some((_, prev)) = slot {
            if *prev != text {
                return Err(Error::Chart(format!(
                    "line {line_no}: conflicting definitions for `{key}`"
                )));
            }
        }
        *slot = Some((expr, text));
    }
    let mut components = Vec::with_capacity(10);
    for i in 0..4 {
        for j in i..4 {
            match comps[tri_index(i, j)].take() {
                Some((e, _)) => components.push(e),
                None if i == j => {
                    return Err(Error::Chart(format!(
                        "missing diagonal entry g_{}{}",
                        coords[i], coords[j]
                    )))
                }
                None => components.push(Expr::num(0.0)),
            }
        }
    }
    let mut chart = MetricChart::new(
        coords,
        kind,
        orientation,
        components.try_into().expect("ten components"),
    )?;
    chart.name = name;
    chart.domain = domain;
    Ok(chart)
}

// ---------------------------------------------------------------------------
// Builtin registry

/// Named fixture charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Flat,
    PaperExample,
    /// Product of two surfaces of constant curvature `c1`, `c2`.
    Product(f64, f64),
    /// Constant curvature `k` in stereographic coordinates.
    SpaceForm(f64),
    LorentzFlat,
}

impl Builtin {
    /// Default parameterisations, one per registry entry.
    pub fn all_defaults() -> Vec<Builtin> {
        vec![
            Builtin::Flat,
            Builtin::PaperExample,
            Builtin::Product(1.0, 1.0),
            Builtin::Product(1.0, -0.5),
            Builtin::SpaceForm(1.0),
            Builtin::SpaceForm(-1.0),
            Builtin::LorentzFlat,
        ]
    }

    /// Accepts `flat`, `paper-example`, `product(c1,c2)`, `space-form(k)`,
    /// `lorentz-flat`; bare `product` and `space-form` use unit curvature.
    pub fn parse(name: &str) -> Result<Builtin> {
        let name = name.trim();
        let args = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Chart(format!("bad builtin parameter `{a}`")))
                })
                .collect()
        };
        let (head, params) = match name.split_once('(') {
            Some((h, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Chart(format!("malformed builtin `{name}`")))?;
                (h.trim(), Some(args(inner)?))
            }
            None => (name, None),
        };
        match (head, params.as_deref()) {
            ("flat", None) => Ok(Builtin::Flat),
            ("paper-example", None) => Ok(Builtin::PaperExample),
            ("lorentz-flat", None) => Ok(Builtin::LorentzFlat),
            ("product", None) => Ok(Builtin::Product(1.0, 1.0)),
            ("product", Some([c1, c2])) => Ok(Builtin::Product(*c1, *c2)),
            ("space-form", None) => Ok(Builtin::SpaceForm(1.0)),
            ("space-form", Some([k])) => Ok(Builtin::SpaceForm(*k)),
            _ => Err(Error::Chart(format!("unknown builtin `{name}`"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::Flat => "flat".into(),
            Builtin::PaperExample => "paper-example".into(),
            Builtin::Product(a, b) => format!("product({a},{b})"),
            Builtin::SpaceForm(k) => format!("space-form({k})"),
            Builtin::LorentzFlat => "lorentz-flat".into(),
        }
    }

    pub fn document(&self) -> String {
        match *self {
            Builtin::Flat => "coords = [w, x, y, z]\nsignature = \"riemannian\"\norientation = 1\n\
                 [metric]\ng_ww = \"1\"\ng_xx = \"1\"\ng_yy = \"1\"\ng_zz = \"1\"\n"
                .into(),
            Builtin::LorentzFlat => "coords = [t, x, y, z]\nsignature = \"lorentzian\"\n\
                 orientation = 1\n[metric]\ng_tt = \"-1\"\ng_xx = \"1\"\ng_yy = \"1\"\ng_zz = \"1\"\n"
                .into(),
            Builtin::PaperExample => "coords = [r, x, y, z]\nsignature = \"riemannian\"\n\
                 orientation = 1\ndomain = \"x > 0\"\n[metric]\ng_rr = \"(2*x)^3\"\n\
                 g_xx = \"1\"\ng_yy = \"(2*x)^(-3)\"\ng_zz = \"1\"\n"
                .into(),
            Builtin::Product(c1, c2) => format!(
                "coords = [u1, v1, u2, v2]\nsignature = \"riemannian\"\norientation = 1\n\
                 domain = \"{}, {}\"\n[metric]\ng_u1_u1 = \"1\"\ng_v1_v1 = \"{}\"\n\
                 g_u2_u2 = \"1\"\ng_v2_v2 = \"{}\"\n",
                warp_domain(c1, "u1"),
                warp_domain(c2, "u2"),
                warp_squared(c1, "u1"),
                warp_squared(c2, "u2")
            ),
            Builtin::SpaceForm(k) => {
                let conformal = format!("4/(1 + ({k:?})*(w^2 + x^2 + y^2 + z^2))^2");
                let domain = if k < 0.0 {
                    format!("w^2+x^2+y^2+z^2 < {}", 1.0 / -k)
                } else {
                    "all of R^4".into()
                };
                format!(
                    "coords = [w, x, y, z]\nsignature = \"riemannian\"\norientation = 1\n\
                     domain = \"{domain}\"\n[metric]\ng_ww = \"{conformal}\"\n\
                     g_xx = \"{conformal}\"\ng_yy = \"{conformal}\"\ng_zz = \"{conformal}\"\n"
                )
            }
        }
    }

    pub fn chart(&self) -> MetricChart {
        parse_metric(&self.document())
            .expect("builtin documents parse")
            .with_name(self.name())
    }

    /// A random point inside the validity region.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> [f64; 4] {
        let mut p = [0.0; 4];
        for v in p.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        match *self {
            Builtin::PaperExample => p[1] = rng.gen_range(0.5..4.0),
            Builtin::Product(c1, c2) => {
                p[0] = warp_sample(c1, rng);
                p[2] = warp_sample(c2, rng);
            }
            Builtin::SpaceForm(k) if k < 0.0 => {
                let r = 0.8 / (-k).sqrt() / 2.0;
                for v in p.iter_mut() {
                    *v *= r;
                }
            }
            _ => {}
        }
        p
    }

    /// The curvature-scale parameter `c1 + c2` for products, used by the
    /// closed-form checks.
    pub fn product_curvatures(&self) -> Option<(f64, f64)> {
        match *self {
            Builtin::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

fn warp_squared(c: f64, u: &str) -> String {
    if c > 0.0 {
        let a = c.sqrt();
        format!("(sin({a:?}*{u})/{a:?})^2")
    } else if c < 0.0 {
        let a = (-c).sqrt();
        format!("(sinh({a:?}*{u})/{a:?})^2")
    } else {
        format!("{u}^2")
    }
}

fn warp_domain(c: f64, u: &str) -> String {
    if c > 0.0 {
        format!("0 < {u} < {}", std::f64::consts::PI / c.sqrt())
    } else {
        format!("{u} > 0")
    }
}

fn warp_sample<R: Rng>(c: f64, rng: &mut R) -> f64 {
    if c > 0.0 {
        let span = std::f64::consts::PI / c.sqrt();
        rng.gen_range(0.2 * span..0.8 * span)
    } else {
        rng.gen_range(0.3..1.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
# the example metric
coords = [r, x, y, z]
signature = "riemannian"
orientation = 1
domain = "x > 0"

[metric]
g_rr = "(2*x)^3"
g_xx = "1"
g_yy = "(2*x)^(-3)"
g_zz = "1"
g_rx = "0"
"#;

    #[test]
    fn parses_the_example_document() {
        let chart = parse_metric(EXAMPLE).unwrap();
        assert_eq!(chart.kind(), MetricKind::Riemannian);
        let j = chart.metric_jets(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(j.g[(0, 0)], 8.0);
        assert_eq!(j.dg[1][0][0], 24.0);
        assert_eq!(j.dg[1][2][2], -0.375);
        assert_eq!(j.ddg[1][1][0][0], 48.0);
    }

    #[test]
    fn flat_has_zero_derivatives() {
        let j = Builtin::Flat.chart().metric_jets(&[0.3, -2.0, 5.0, 1.0]).unwrap();
        assert_eq!(j.g, Matrix4::identity());
        assert!(j.dg.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn document_errors() {
        let unknown = EXAMPLE.replace("g_rx = \"0\"", "g_xy = \"foo(x)\"");
        assert!(matches!(
            parse_metric(&unknown),
            Err(Error::UnknownFunction { line: 13, .. })
        ));
        let three = EXAMPLE.replace("[r, x, y, z]", "[r, x, y]");
        assert!(matches!(parse_metric(&three), Err(Error::Chart(_))));
        let missing = EXAMPLE.replace("g_zz = \"1\"\n", "");
        assert!(matches!(parse_metric(&missing), Err(Error::Chart(_))));
        let bad = EXAMPLE.replace("\"(2*x)^3\"", "\"(2*x)^^3\"");
        match parse_metric(&bad) {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 9);
                assert_eq!(column, 15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn domain_violation_surfaces() {
        let chart = Builtin::PaperExample.chart();
        assert!(chart.metric_jets(&[0.0, -1.0, 0.0, 0.0]).is_err());
        assert!(matches!(
            chart.metric_jets(&[0.0, 0.0, 0.0, 0.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn document_round_trip() {
        for b in Builtin::all_defaults() {
            let chart = b.chart();
            let back = parse_metric(&chart.to_document()).unwrap();
            let p = b.sample_point(&mut rand::thread_rng());
            let g1 = chart.metric_at(&p).unwrap();
            let g2 = back.metric_at(&p).unwrap();
            assert_eq!(g1, g2, "{}", b.name());
        }
    }

    #[test]
    fn builtin_names_parse() {
        for b in Builtin::all_defaults() {
            assert_eq!(Builtin::parse(&b.name()).unwrap(), b);
        }
        assert_eq!(Builtin::parse("product(1, 2)").unwrap(), Builtin::Product(1.0, 2.0));
        assert!(Builtin::parse("torus").is_err());
    }

    #[test]
    fn bridge_flat_and_involution() {
        let flat = Builtin::Flat.chart();
        let t = flat.parse_vector("1,0,0,0").unwrap();
        let l = bridge_metric(&flat, &t);
        assert_eq!(l.kind(), MetricKind::Lorentzian);
        let g = l.metric_at(&[0.0; 4]).unwrap();
        assert_eq!(g, Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0)));

        let example = Builtin::PaperExample.chart();
        let t = example.parse_vector("1/sqrt(16*x^3), 1/sqrt(2), 0, 0").unwrap();
        let gl = bridge_metric(&example, &t);
        let back = bridge_metric(&gl, &t);
        for x in [0.5, 1.0, 2.5] {
            let p = [0.1, x, -0.3, 0.7];
            let g0 = example.metric_at(&p).unwrap();
            let g2 = back.metric_at(&p).unwrap();
            assert!((g0 - g2).abs().max() < 1e-12);
            check_signature(&gl.metric_at(&p).unwrap(), MetricKind::Lorentzian).unwrap();
        }
    }

    #[test]
    fn bridge_rejects_non_unit() {
        let flat = Builtin::Flat.chart();
        let t = flat.parse_vector("2,0,0,0").unwrap();
        let l = bridge_metric(&flat, &t);
        assert!(matches!(l.metric_at(&[0.0; 4]), Err(Error::NonUnitVector { .. })));
        assert!(bridge_matrix(&Matrix4::identity(), &Vector4::new(2.0, 0.0, 0.0, 0.0), MetricKind::Riemannian).is_err());
    }
}
