//! Scenario files: a single TOML document describing the quantum group,
//! named corepresentations, the structure calculus, the base calculus, the
//! bundle and the connection. Every error carries the key path it refers to.

use std::sync::Arc;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::algebra::{AlgebraContext, FiniteAlgebra};
use crate::bundle::QPBundle;
use crate::comodule::ComoduleAlgebra;
use crate::corep::Corep;
use crate::error::{Error, Result};
use crate::expr::parse_element;
use crate::hopf::{FiniteGroup, HopfAlgebra};
use crate::linalg::{axpy, zero_vec, Vector};
use crate::scalar::CycScalar;

#[derive(Clone, Debug)]
pub struct CalculusSpec {
    /// generators of the right ideal; empty means the universal calculus
    pub generators: Vec<Vector>,
    pub degree_cap: usize,
    /// also compare curvature against an alternative admissible `δ`
    pub delta_alt: bool,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub conductor: u32,
    pub hopf: Arc<HopfAlgebra>,
    pub coreps: Vec<Corep>,
    pub calculus: CalculusSpec,
    pub base_cap: usize,
    pub bundle: Option<QPBundle>,
    /// check every sampled member of the derivative space, not only the particular one
    pub all_members: bool,
    /// hex SHA-256 of the input text
    pub digest: String,
}

fn loc_err(path: &str, msg: impl Into<String>) -> Error {
    Error::parse(path, msg)
}

fn get<'a>(t: &'a Table, path: &str, key: &str) -> Option<(&'a Value, String)> {
    let full = if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    t.get(key).map(|v| (v, full))
}

fn req<'a>(t: &'a Table, path: &str, key: &str) -> Result<(&'a Value, String)> {
    get(t, path, key).ok_or_else(|| loc_err(if path.is_empty() { "document" } else { path }, format!("missing key '{key}'")))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| loc_err(path, "expected a string"))
}

fn as_int(v: &Value, path: &str) -> Result<i64> {
    v.as_integer().ok_or_else(|| loc_err(path, "expected an integer"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    let n = as_int(v, path)?;
    usize::try_from(n).map_err(|_| loc_err(path, "expected a non-negative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| loc_err(path, "expected an array"))
}

fn as_table<'a>(v: &'a Value, path: &str) -> Result<&'a Table> {
    v.as_table().ok_or_else(|| loc_err(path, "expected a table"))
}

fn str_list(v: &Value, path: &str) -> Result<Vec<String>> {
    as_array(v, path)?.iter().enumerate().map(|(i, x)| as_str(x, &format!("{path}[{i}]")).map(str::to_string)).collect()
}

/// Re-anchors an expression error at the key it came from.
fn expr_at<T>(r: Result<T>, path: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { location, message } => loc_err(&format!("{path}, {location}"), message),
        other => loc_err(path, other.to_string()),
    })
}

fn element(alg: &FiniteAlgebra, conductor: u32, text: &str, path: &str) -> Result<Vector> {
    expr_at(parse_element(text, &AlgebraContext { algebra: alg, conductor }), path)
}

fn table_location(text: &str, err: &toml::de::Error) -> String {
    match err.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            format!("line {line}, column {col}")
        }
        None => "document".into(),
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let doc: Table = text.parse::<Table>().map_err(|e| loc_err(&table_location(text, &e), e.message().to_string()))?;
        let digest = hex(&Sha256::digest(text.as_bytes()));
        let name = match get(&doc, "", "name") {
            Some((v, p)) => as_str(v, &p)?.to_string(),
            None => "scenario".into(),
        };
        let (hv, hp) = req(&doc, "", "hopf")?;
        let hopf = Arc::new(parse_hopf(as_table(hv, &hp)?, "hopf")?);
        let conductor = match get(&doc, "", "conductor") {
            Some((v, p)) => {
                let c = as_int(v, &p)?;
                if !(1..=1024).contains(&c) {
                    return Err(loc_err(&p, "conductor must lie in 1..=1024"));
                }
                num_integer::Integer::lcm(&(c as u32), &hopf.splitting_conductor)
            }
            None => hopf.splitting_conductor,
        };
        let mut coreps = Vec::new();
        if let Some((v, p)) = get(&doc, "", "corep") {
            for (cname, cv) in as_table(v, &p)? {
                let cp = format!("corep.{cname}");
                coreps.push(parse_corep(&hopf, conductor, cname, as_table(cv, &cp)?, &cp)?);
            }
        }
        let calculus = match get(&doc, "", "calculus") {
            Some((v, p)) => parse_calculus(&hopf, conductor, as_table(v, &p)?, &p)?,
            None => CalculusSpec { generators: Vec::new(), degree_cap: 2, delta_alt: true },
        };
        let base_cap = match get(&doc, "", "base") {
            Some((v, p)) => {
                let t = as_table(v, &p)?;
                match get(t, &p, "degree_cap") {
                    Some((c, cp)) => {
                        let cap = as_usize(c, &cp)?;
                        if !(1..=3).contains(&cap) {
                            return Err(loc_err(&cp, "degree cap must lie in 1..=3"));
                        }
                        cap
                    }
                    None => 2,
                }
            }
            None => 2,
        };
        let bundle = match get(&doc, "", "bundle") {
            Some((v, p)) => Some(parse_bundle(&hopf, conductor, as_table(v, &p)?, &p)?),
            None => None,
        };
        let all_members = match get(&doc, "", "connection") {
            Some((v, p)) => {
                let t = as_table(v, &p)?;
                match get(t, &p, "members") {
                    Some((m, mp)) => match as_str(m, &mp)? {
                        "all" => true,
                        "particular" => false,
                        other => return Err(loc_err(&mp, format!("unknown member selection '{other}' (expected 'all' or 'particular')"))),
                    },
                    None => true,
                }
            }
            None => true,
        };
        Ok(Scenario { name, conductor, hopf, coreps, calculus, base_cap, bundle, all_members, digest })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_group(t: &Table, path: &str) -> Result<FiniteGroup> {
    if let Some((v, p)) = get(t, path, "cayley") {
        let rows = as_array(v, &p)?
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let rp = format!("{p}[{i}]");
                as_array(r, &rp)?.iter().enumerate().map(|(j, x)| as_int(x, &format!("{rp}[{j}]"))).collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let names = match get(t, path, "elements") {
            Some((v, ep)) => Some(str_list(v, &ep)?),
            None => None,
        };
        return FiniteGroup::from_cayley(&rows, names).map_err(|e| match e {
            Error::Parse { location, message } => loc_err(&format!("{p}: {location}"), message),
            other => loc_err(&p, other.to_string()),
        });
    }
    let (g, gp) = req(t, path, "group")?;
    match as_str(g, &gp)? {
        "cyclic" => {
            let (o, op) = req(t, path, "order")?;
            let n = as_usize(o, &op)?;
            if !(1..=12).contains(&n) {
                return Err(loc_err(&op, "cyclic order must lie in 1..=12"));
            }
            Ok(FiniteGroup::cyclic(n))
        }
        "symmetric3" => Ok(FiniteGroup::symmetric3()),
        other => Err(loc_err(&gp, format!("unknown group '{other}' (expected 'cyclic', 'symmetric3' or a 'cayley' table)"))),
    }
}

fn parse_hopf(t: &Table, path: &str) -> Result<HopfAlgebra> {
    let (k, kp) = req(t, path, "type")?;
    let group = parse_group(t, path)?;
    match as_str(k, &kp)? {
        "function_algebra" => Ok(HopfAlgebra::function_algebra(&group)),
        "group_algebra" => Ok(HopfAlgebra::group_algebra(&group)),
        other => Err(loc_err(&kp, format!("unknown Hopf algebra type '{other}' (expected 'function_algebra' or 'group_algebra')"))),
    }
}

fn parse_corep(hopf: &Arc<HopfAlgebra>, conductor: u32, name: &str, t: &Table, path: &str) -> Result<Corep> {
    let (d, dp) = req(t, path, "dim")?;
    let dim = as_usize(d, &dp)?;
    let (m, mp) = req(t, path, "matrix")?;
    let rows = as_array(m, &mp)?;
    if rows.len() != dim {
        return Err(loc_err(&mp, format!("expected {dim} rows")));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, r) in rows.iter().enumerate() {
        let rp = format!("{mp}[{i}]");
        let cells = as_array(r, &rp)?;
        if cells.len() != dim {
            return Err(loc_err(&rp, format!("expected {dim} entries")));
        }
        for (j, c) in cells.iter().enumerate() {
            let cp = format!("{rp}[{j}]");
            entries.push(element(&hopf.algebra, conductor, as_str(c, &cp)?, &cp)?);
        }
    }
    Corep::new(hopf.clone(), name, dim, entries).map_err(|e| loc_err(path, e.to_string()))
}

fn parse_calculus(hopf: &Arc<HopfAlgebra>, conductor: u32, t: &Table, path: &str) -> Result<CalculusSpec> {
    let generators = match get(t, path, "generators") {
        Some((v, p)) => str_list(v, &p)?
            .iter()
            .enumerate()
            .map(|(i, s)| element(&hopf.algebra, conductor, s, &format!("{p}[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let degree_cap = match get(t, path, "degree_cap") {
        Some((v, p)) => {
            let c = as_usize(v, &p)?;
            if !(1..=4).contains(&c) {
                return Err(loc_err(&p, "degree cap must lie in 1..=4"));
            }
            c
        }
        None => 2,
    };
    let delta_alt = match get(t, path, "delta_alt") {
        Some((v, p)) => v.as_bool().ok_or_else(|| loc_err(&p, "expected a boolean"))?,
        None => true,
    };
    Ok(CalculusSpec { generators, degree_cap, delta_alt })
}

fn parse_bundle(hopf: &Arc<HopfAlgebra>, conductor: u32, t: &Table, path: &str) -> Result<QPBundle> {
    let (k, kp) = req(t, path, "type")?;
    match as_str(k, &kp)? {
        "checkerboard" => QPBundle::checkerboard(hopf.clone()).map_err(|e| loc_err(&kp, e.to_string())),
        "point" => Ok(QPBundle::point(hopf.clone())),
        "trivial" => {
            let (p, pp) = req(t, path, "points")?;
            let n = as_usize(p, &pp)?;
            if !(1..=4).contains(&n) {
                return Err(loc_err(&pp, "point count must lie in 1..=4"));
            }
            Ok(QPBundle::trivial(n, hopf.clone()))
        }
        "custom" => parse_custom_bundle(hopf, conductor, t, path),
        other => Err(loc_err(&kp, format!("unknown bundle type '{other}' (expected 'checkerboard', 'point', 'trivial' or 'custom')"))),
    }
}

fn triples(v: &Value, path: &str) -> Result<Vec<(Vec<String>, String)>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{path}[{i}]");
            let items = str_list(x, &p)?;
            if items.len() < 2 {
                return Err(loc_err(&p, "expected at least two strings"));
            }
            let (last, head) = items.split_last().expect("non-empty");
            Ok((head.to_vec(), last.clone()))
        })
        .collect()
}

fn parse_custom_bundle(hopf: &Arc<HopfAlgebra>, conductor: u32, t: &Table, path: &str) -> Result<QPBundle> {
    let (b, bp) = req(t, path, "basis")?;
    let labels = str_list(b, &bp)?;
    let m = labels.len();
    if m == 0 || m > 64 {
        return Err(loc_err(&bp, "basis must have between 1 and 64 elements"));
    }
    let index = |name: &str, p: &str| labels.iter().position(|l| l == name).ok_or_else(|| loc_err(p, format!("unknown basis element '{name}'")));
    // products: [x, y, expr] with expr a linear combination of basis labels
    let linear = |text: &str, p: &str| -> Result<Vector> {
        let basis_alg = FiniteAlgebra::ungraded(labels.clone(), |_, _| zero_vec(m), zero_vec(m), |_| zero_vec(m));
        element(&basis_alg, conductor, text, p)
    };
    let mut products = vec![zero_vec(m); m * m];
    if let Some((v, p)) = get(t, path, "products") {
        for (i, (head, expr)) in triples(v, &p)?.into_iter().enumerate() {
            let ip = format!("{p}[{i}]");
            if head.len() != 2 {
                return Err(loc_err(&ip, "expected [x, y, product]"));
            }
            let (x, y) = (index(&head[0], &ip)?, index(&head[1], &ip)?);
            products[x * m + y] = linear(&expr, &ip)?;
        }
    }
    let (sv, sp) = req(t, path, "star")?;
    let mut stars: Vec<Option<Vector>> = vec![None; m];
    for (i, (head, expr)) in triples(sv, &sp)?.into_iter().enumerate() {
        let ip = format!("{sp}[{i}]");
        if head.len() != 1 {
            return Err(loc_err(&ip, "expected [x, x*]"));
        }
        stars[index(&head[0], &ip)?] = Some(linear(&expr, &ip)?);
    }
    let stars = stars
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| loc_err(&sp, format!("no star given for '{}'", labels[i]))))
        .collect::<Result<Vec<_>>>()?;
    let (uv, up) = req(t, path, "unit")?;
    let unit = linear(as_str(uv, &up)?, &up)?;
    let algebra = FiniteAlgebra::ungraded(labels.clone(), |i, j| products[i * m + j].clone(), unit, |i| stars[i].clone());

    // coaction: [x, y, h] contributes y ⊗ h to Φ(x)
    let nh = hopf.dim();
    let mut coaction = vec![zero_vec(m * nh); m];
    let (cv, cp) = req(t, path, "coaction")?;
    for (i, (head, expr)) in triples(cv, &cp)?.into_iter().enumerate() {
        let ip = format!("{cp}[{i}]");
        if head.len() != 2 {
            return Err(loc_err(&ip, "expected [x, y, h]"));
        }
        let (x, y) = (index(&head[0], &ip)?, index(&head[1], &ip)?);
        let h = element(&hopf.algebra, conductor, &expr, &ip)?;
        let mut term = zero_vec(m * nh);
        for (k, c) in h.iter().enumerate() {
            term[y * nh + k] = c.clone();
        }
        axpy(&mut coaction[x], &CycScalar::one(), &term);
    }
    let ctx_alg = algebra.clone();
    let in_algebra = |text: &str, p: &str| element(&ctx_alg, conductor, text, p);
    let (pv, pp) = req(t, path, "base_points")?;
    let points = str_list(pv, &pp)?.iter().enumerate().map(|(i, s)| in_algebra(s, &format!("{pp}[{i}]"))).collect::<Result<Vec<_>>>()?;
    let transport = match get(t, path, "transport") {
        Some((v, p)) => str_list(v, &p)?.iter().enumerate().map(|(i, s)| in_algebra(s, &format!("{p}[{i}]"))).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let name = match get(t, path, "name") {
        Some((v, p)) => as_str(v, &p)?.to_string(),
        None => "custom bundle".into(),
    };
    let total = ComoduleAlgebra::new(algebra, hopf.clone(), coaction).map_err(|e| loc_err(&cp, e.to_string()))?;
    Ok(QPBundle::new(name, total, points, transport))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtin_and_custom_bundles() {
        let s = Scenario::from_toml(
            r#"
            [hopf]
            type = "function_algebra"
            group = "cyclic"
            order = 2
            [bundle]
            type = "custom"
            basis = ["a", "b"]
            products = [["a", "a", "a"], ["b", "b", "b"]]
            star = [["a", "a"], ["b", "b"]]
            unit = "a + b"
            coaction = [["a", "a", "1"], ["b", "b", "1"]]
            base_points = ["a"]
            "#,
        )
        .unwrap();
        let b = s.bundle.unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.algebra().check_all(), Ok(()));
        assert_eq!(s.digest.len(), 64);
    }

    #[test]
    fn errors_carry_key_paths() {
        let bad = "[hopf]\ntype = \"function_algebra\"\ncayley = [[1, 2], [1, 2]]\n";
        match Scenario::from_toml(bad) {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("hopf.cayley"), "{location}"),
            other => panic!("expected a parse error, got {other:?}"),
        }
        match Scenario::from_toml("[hopf\n") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 1"), "{location}"),
            other => panic!("expected a parse error, got {other:?}"),
        }
        let bad_expr = "[hopf]\ntype = \"function_algebra\"\ngroup = \"cyclic\"\norder = 2\n[corep.x]\ndim = 1\nmatrix = [[\"d_r0 + $\"]]\n";
        match Scenario::from_toml(bad_expr) {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("corep.x.matrix[0][0]"), "{location}"),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}
