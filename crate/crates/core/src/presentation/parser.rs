use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::ParseError;
use crate::field::FieldSpec;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

type PResult<T> = Result<T, ParseError>;

fn err_at(line: usize, column: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError { line, column, message: message.into(), expected: expected.iter().map(|s| s.to_string()).collect() }
}

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        let toks = tokenize(src)?;
        let lines = src.split('\n').count();
        let last_len = src.rsplit('\n').next().map_or(0, |l| l.chars().count());
        Ok(Parser { toks, pos: 0, eof: (lines.max(1), last_len + 1) })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.eof, |t| (t.line, t.column))
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let (l, c) = self.here();
        let found = self.peek().map_or("end of input".to_string(), Tok::describe);
        err_at(l, c, format!("{}, found {found}", message.into()), expected)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}"), &[what]))
        }
    }

    fn at_end_of_statement(&self) -> bool {
        matches!(self.peek(), None | Some(Tok::Sep))
    }

    fn end_statement(&mut self) -> PResult<()> {
        if self.at_end_of_statement() {
            self.eat(&Tok::Sep);
            Ok(())
        } else {
            Err(self.error("unexpected token", &["end of statement"]))
        }
    }

    fn skip_separators(&mut self) {
        while self.eat(&Tok::Sep) {}
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"), &[what])),
        }
    }

    /// Vertex names may be identifiers or bare integers.
    fn vertex_name(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Int(n)) => {
                let s = n.to_string();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected vertex name", &["vertex name"])),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{kw}`"), &[kw])),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let negative = self.eat(&Tok::Minus);
        if !negative {
            self.eat(&Tok::Plus);
        }
        match self.peek() {
            Some(Tok::Int(n)) => {
                let v = n.to_i64().ok_or_else(|| self.error("integer out of range", &["integer"]))?;
                self.pos += 1;
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error("expected integer", &["integer"])),
        }
    }

    fn coefficient(&mut self) -> PResult<BigRational> {
        let num = match self.bump() {
            Some(Tok::Int(n)) => n,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected coefficient", &["integer"]));
            }
        };
        if self.eat(&Tok::Slash) {
            let den = match self.peek() {
                Some(Tok::Int(d)) => d.clone(),
                _ => return Err(self.error("expected denominator", &["integer"])),
            };
            if den.is_zero() {
                return Err(self.error("zero denominator", &["nonzero integer"]));
            }
            self.pos += 1;
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    /// `[-] term ((+|-) term)*` or `0`. `max_factors` bounds the number of
    /// `*`-joined names per term (1 for module label combinations).
    fn combination(&mut self, max_factors: usize) -> PResult<LinearCombination> {
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let mut negative = false;
            if self.eat(&Tok::Minus) {
                negative = true;
            } else if self.eat(&Tok::Plus) {
            } else if !first {
                break;
            }
            first = false;
            let (line, col) = self.here();
            let mut coeff = BigRational::from_integer(BigInt::from(1));
            let mut path = Vec::new();
            match self.peek() {
                Some(Tok::Int(_)) => {
                    coeff = self.coefficient()?;
                    if self.eat(&Tok::Star) {
                        path.push(self.ident("name")?);
                    }
                }
                Some(Tok::Ident(_)) => path.push(self.ident("name")?),
                _ => return Err(self.error("expected term", &["coefficient", "name"])),
            }
            while self.eat(&Tok::Star) {
                path.push(self.ident("name")?);
            }
            if path.len() > max_factors {
                return Err(err_at(line, col, "a single label was expected in this term", &["label"]));
            }
            if path.is_empty() {
                if coeff.is_zero() {
                    continue;
                }
                return Err(err_at(line, col, "constant terms are not allowed", &["path"]));
            }
            if negative {
                coeff = -coeff;
            }
            terms.push((line, col, Term { coeff: Coefficient(coeff), path }));
        }
        Ok(LinearCombination { terms: merge_terms(terms) })
    }
}

/// Combines repeated paths and drops zero coefficients, keeping first-occurrence order.
fn merge_terms(raw: Vec<(usize, usize, Term)>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for (_, _, t) in raw {
        if let Some(existing) = out.iter_mut().find(|e| e.path == t.path) {
            existing.coeff = Coefficient(&existing.coeff.0 + &t.coeff.0);
        } else {
            out.push(t);
        }
    }
    out.retain(|t| !t.coeff.is_zero());
    out
}

struct Positioned<T> {
    line: usize,
    column: usize,
    item: T,
}

/// Parses either kind of presentation file.
pub fn parse(src: &str) -> PResult<Document> {
    let mut p = Parser::new(src)?;
    p.skip_separators();
    match p.peek() {
        Some(Tok::Ident(s)) if s == "module" => parse_module(src).map(Document::Module),
        _ => parse_algebra(src).map(Document::Algebra),
    }
}

pub fn parse_algebra(src: &str) -> PResult<AlgebraPresentation> {
    let mut p = Parser::new(src)?;
    let mut field: Option<FieldSpec> = None;
    let mut vertices: Option<Vec<String>> = None;
    let mut arrows: Vec<Positioned<ArrowDecl>> = Vec::new();
    let mut relations: Vec<Positioned<LinearCombination>> = Vec::new();
    let mut diffs: Vec<Positioned<(String, LinearCombination)>> = Vec::new();
    let mut max_path_length = None;
    const KEYWORDS: &[&str] = &["field", "vertices", "arrow", "rel", "diff", "max_path_length"];

    loop {
        p.skip_separators();
        if p.peek().is_none() {
            break;
        }
        let (line, column) = p.here();
        let kw = p.ident("statement keyword").map_err(|e| ParseError { expected: KEYWORDS.iter().map(|s| s.to_string()).collect(), ..e })?;
        match kw.as_str() {
            "field" => {
                if field.is_some() {
                    return Err(err_at(line, column, "duplicate `field` statement", &[]));
                }
                let (l, c) = p.here();
                let name = match p.bump() {
                    Some(Tok::Ident(s)) => s,
                    _ => return Err(err_at(l, c, "expected field name", &["Q", "F<p>"])),
                };
                field = Some(FieldSpec::parse(&name).ok_or_else(|| err_at(l, c, format!("unknown field `{name}`"), &["Q", "F<p> with p prime < 2^31"]))?);
            }
            "vertices" => {
                if vertices.is_some() {
                    return Err(err_at(line, column, "duplicate `vertices` statement", &[]));
                }
                let mut vs = Vec::new();
                while !p.at_end_of_statement() {
                    let (l, c) = p.here();
                    let v = p.vertex_name()?;
                    if vs.contains(&v) {
                        return Err(err_at(l, c, format!("duplicate vertex `{v}`"), &[]));
                    }
                    vs.push(v);
                }
                vertices = Some(vs);
            }
            "arrow" => {
                let name = p.ident("arrow name")?;
                p.expect(Tok::Colon, "`:`")?;
                let source = p.vertex_name()?;
                p.expect(Tok::Arrow, "`->`")?;
                let target = p.vertex_name()?;
                p.keyword("deg")?;
                let degree = p.signed_int()?;
                arrows.push(Positioned { line, column, item: ArrowDecl { name, source, target, degree } });
            }
            "rel" => {
                let c = p.combination(usize::MAX)?;
                relations.push(Positioned { line, column, item: c });
            }
            "diff" => {
                let a = p.ident("arrow name")?;
                p.expect(Tok::Equals, "`=`")?;
                let c = p.combination(usize::MAX)?;
                diffs.push(Positioned { line, column, item: (a, c) });
            }
            "max_path_length" => {
                if max_path_length.is_some() {
                    return Err(err_at(line, column, "duplicate `max_path_length` statement", &[]));
                }
                let (l, c) = p.here();
                let n = p.signed_int()?;
                if n <= 0 {
                    return Err(err_at(l, c, "max_path_length must be positive", &["positive integer"]));
                }
                max_path_length = Some(n as usize);
            }
            other => {
                return Err(err_at(line, column, format!("unknown statement `{other}`"), KEYWORDS));
            }
        }
        p.end_statement()?;
    }

    let vertices = vertices.ok_or_else(|| err_at(p.eof.0, p.eof.1, "missing `vertices` statement", &["vertices"]))?;
    let vertex_set: HashSet<&str> = vertices.iter().map(String::as_str).collect();
    let mut arrow_index: HashMap<String, ArrowDecl> = HashMap::new();
    for a in &arrows {
        let d = &a.item;
        if arrow_index.contains_key(&d.name) {
            return Err(err_at(a.line, a.column, format!("duplicate arrow `{}`", d.name), &[]));
        }
        for v in [&d.source, &d.target] {
            if !vertex_set.contains(v.as_str()) {
                return Err(err_at(a.line, a.column, format!("unknown vertex `{v}`"), &[]));
            }
        }
        if d.degree > 0 {
            return Err(err_at(a.line, a.column, format!("arrow `{}` has degree {} > 0", d.name, d.degree), &["degree <= 0"]));
        }
        arrow_index.insert(d.name.clone(), d.clone());
    }

    // (source, target, degree) of a path, checking composability
    let path_shape = |path: &[String], line: usize, column: usize| -> PResult<(String, String, i64)> {
        let mut shape: Option<(String, String, i64)> = None;
        for name in path {
            let a = arrow_index.get(name).ok_or_else(|| err_at(line, column, format!("unknown arrow `{name}`"), &[]))?;
            shape = Some(match shape {
                None => (a.source.clone(), a.target.clone(), a.degree),
                Some((s, t, d)) => {
                    if t != a.source {
                        return Err(err_at(line, column, format!("path {} is not composable at `{name}`", path.join("*")), &[]));
                    }
                    (s, a.target.clone(), d + a.degree)
                }
            });
        }
        Ok(shape.expect("non-empty path"))
    };

    for r in &relations {
        let mut shape: Option<(String, String, i64)> = None;
        if r.item.is_zero() {
            return Err(err_at(r.line, r.column, "relation is zero", &[]));
        }
        for t in &r.item.terms {
            let s = path_shape(&t.path, r.line, r.column)?;
            match &shape {
                None => shape = Some(s),
                Some(prev) if prev.0 != s.0 || prev.1 != s.1 => {
                    return Err(err_at(r.line, r.column, format!("non-homogeneous relation: {} is not parallel to the other terms", t.path.join("*")), &[]));
                }
                Some(prev) if prev.2 != s.2 => {
                    return Err(err_at(
                        r.line,
                        r.column,
                        format!("non-homogeneous relation: {} has degree {} but other terms have degree {}", t.path.join("*"), s.2, prev.2),
                        &[],
                    ));
                }
                _ => {}
            }
        }
    }

    let mut assigned = HashSet::new();
    for d in &diffs {
        let (name, comb) = &d.item;
        let a = arrow_index.get(name).ok_or_else(|| err_at(d.line, d.column, format!("unknown arrow `{name}`"), &[]))?;
        if !assigned.insert(name.clone()) {
            return Err(err_at(d.line, d.column, format!("differential of `{name}` assigned twice"), &[]));
        }
        for t in &comb.terms {
            let (s, tg, deg) = path_shape(&t.path, d.line, d.column)?;
            if s != a.source || tg != a.target {
                return Err(err_at(d.line, d.column, format!("d({name}) term {} is not parallel to `{name}`", t.path.join("*")), &[]));
            }
            if deg != a.degree + 1 {
                return Err(err_at(d.line, d.column, format!("d({name}) term {} has degree {deg}, expected {}", t.path.join("*"), a.degree + 1), &[]));
            }
        }
    }

    Ok(AlgebraPresentation {
        field: field.unwrap_or(FieldSpec::Rational),
        vertices,
        arrows: arrows.into_iter().map(|a| a.item).collect(),
        relations: relations.into_iter().map(|r| r.item).collect(),
        differentials: diffs.into_iter().map(|d| d.item).collect(),
        max_path_length,
    })
}

pub fn parse_module(src: &str) -> PResult<ModulePresentation> {
    let mut p = Parser::new(src)?;
    let mut name = None;
    let mut basis: Vec<ModuleBasisDecl> = Vec::new();
    let mut actions: Vec<Positioned<ActionDecl>> = Vec::new();
    let mut diffs: Vec<Positioned<(String, LinearCombination)>> = Vec::new();
    const KEYWORDS: &[&str] = &["module", "basis", "act", "diff"];

    loop {
        p.skip_separators();
        if p.peek().is_none() {
            break;
        }
        let (line, column) = p.here();
        let kw = p.ident("statement keyword").map_err(|e| ParseError { expected: KEYWORDS.iter().map(|s| s.to_string()).collect(), ..e })?;
        match kw.as_str() {
            "module" => {
                if name.is_some() {
                    return Err(err_at(line, column, "duplicate `module` statement", &[]));
                }
                name = Some(p.ident("module name")?);
            }
            "basis" => {
                let label = p.ident("basis label")?;
                p.keyword("vertex")?;
                let vertex = p.vertex_name()?;
                p.keyword("deg")?;
                let degree = p.signed_int()?;
                if basis.iter().any(|b| b.label == label) {
                    return Err(err_at(line, column, format!("duplicate basis label `{label}`"), &[]));
                }
                basis.push(ModuleBasisDecl { label, vertex, degree });
            }
            "act" => {
                let arrow = p.ident("arrow name")?;
                p.expect(Tok::Colon, "`:`")?;
                let source = p.ident("basis label")?;
                p.expect(Tok::Arrow, "`->`")?;
                let image = p.combination(1)?;
                actions.push(Positioned { line, column, item: ActionDecl { arrow, source, image } });
            }
            "diff" => {
                let label = p.ident("basis label")?;
                p.expect(Tok::Equals, "`=`")?;
                let c = p.combination(1)?;
                diffs.push(Positioned { line, column, item: (label, c) });
            }
            other => return Err(err_at(line, column, format!("unknown statement `{other}`"), KEYWORDS)),
        }
        p.end_statement()?;
    }
    let name = name.ok_or_else(|| err_at(1, 1, "missing `module` statement", &["module"]))?;
    let labels: HashSet<&str> = basis.iter().map(|b| b.label.as_str()).collect();
    let check = |l: &str, line, column| -> PResult<()> {
        if labels.contains(l) {
            Ok(())
        } else {
            Err(err_at(line, column, format!("unknown basis label `{l}`"), &[]))
        }
    };
    let mut seen_acts = HashSet::new();
    for a in &actions {
        check(&a.item.source, a.line, a.column)?;
        for t in &a.item.image.terms {
            check(&t.path[0], a.line, a.column)?;
        }
        if !seen_acts.insert((a.item.arrow.clone(), a.item.source.clone())) {
            return Err(err_at(a.line, a.column, format!("action of `{}` on `{}` given twice", a.item.arrow, a.item.source), &[]));
        }
    }
    let mut seen_diffs = HashSet::new();
    for d in &diffs {
        check(&d.item.0, d.line, d.column)?;
        for t in &d.item.1.terms {
            check(&t.path[0], d.line, d.column)?;
        }
        if !seen_diffs.insert(d.item.0.clone()) {
            return Err(err_at(d.line, d.column, format!("differential of `{}` given twice", d.item.0), &[]));
        }
    }
    Ok(ModulePresentation {
        name,
        basis,
        actions: actions.into_iter().map(|a| a.item).collect(),
        differentials: diffs.into_iter().map(|d| d.item).collect(),
    })
}

/// `simple(v)`, `free(v)`, `free(v)[k]`, `simples_sum`, `regular`, `regular[k]`.
pub fn parse_designator(src: &str) -> PResult<ModuleDesignator> {
    let mut p = Parser::new(src)?;
    let head = p.ident("module designator").map_err(|e| ParseError {
        expected: vec!["simple(<v>)".into(), "free(<v>)[<k>]".into(), "simples_sum".into(), "regular[<k>]".into()],
        ..e
    })?;
    let shift = |p: &mut Parser| -> PResult<i64> {
        if p.eat(&Tok::LBracket) {
            let k = p.signed_int()?;
            p.expect(Tok::RBracket, "`]`")?;
            Ok(k)
        } else {
            Ok(0)
        }
    };
    let d = match head.as_str() {
        "simple" => {
            p.expect(Tok::LParen, "`(`")?;
            let v = p.vertex_name()?;
            p.expect(Tok::RParen, "`)`")?;
            ModuleDesignator::Simple(v)
        }
        "free" => {
            p.expect(Tok::LParen, "`(`")?;
            let v = p.vertex_name()?;
            p.expect(Tok::RParen, "`)`")?;
            let k = shift(&mut p)?;
            ModuleDesignator::Free(v, k)
        }
        "simples_sum" => ModuleDesignator::SimplesSum,
        "regular" => ModuleDesignator::Regular(shift(&mut p)?),
        other => {
            return Err(err_at(1, 1, format!("unknown module designator `{other}`"), &["simple", "free", "simples_sum", "regular"]));
        }
    };
    if p.peek().is_some() {
        return Err(p.error("trailing input after designator", &["end of input"]));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_arrow_presentation() {
        let p = parse_algebra("vertices 1 2; arrow a: 1 -> 2 deg -2").unwrap();
        assert_eq!(p.vertices, vec!["1", "2"]);
        assert_eq!(p.arrows.len(), 1);
        assert_eq!(p.arrows[0].degree, -2);
        assert_eq!(p.field, FieldSpec::Rational);
    }

    #[test]
    fn base_field_presentation() {
        let p = parse_algebra("field F7\nvertices x\n").unwrap();
        assert!(p.arrows.is_empty());
        assert_eq!(p.field, FieldSpec::Prime(7));
    }

    #[test]
    fn homogeneity_is_enforced() {
        let ok = "vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg 0\narrow c : 1 -> 3 deg 0\nrel a*b - 2*c\n";
        let p = parse_algebra(ok).unwrap();
        assert_eq!(p.relations[0].terms.len(), 2);
        let bad = ok.replace("arrow c : 1 -> 3 deg 0", "arrow c : 1 -> 3 deg -1");
        let e = parse_algebra(&bad).unwrap_err();
        assert!(e.message.contains("non-homogeneous"), "{e}");
        assert_eq!(e.line, 5);
    }

    #[test]
    fn positive_degree_arrow_is_rejected() {
        let e = parse_algebra("vertices 1\narrow x : 1 -> 1 deg 1\n").unwrap_err();
        assert!(e.message.contains("degree 1 > 0"));
        assert_eq!((e.line, e.column), (2, 1));
    }

    #[test]
    fn unknown_names_are_reported() {
        let e = parse_algebra("vertices 1\narrow x : 1 -> 2 deg 0\n").unwrap_err();
        assert!(e.message.contains("unknown vertex"));
        let e = parse_algebra("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*y\n").unwrap_err();
        assert!(e.message.contains("unknown arrow `y`"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_algebra("vertices 1\narrow x 1 -> 1 deg 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        assert_eq!(e.expected, vec!["`:`".to_string()]);
        let e = parse_algebra("vertices 1\nfrobnicate\n").unwrap_err();
        assert!(e.message.contains("unknown statement"));
    }

    #[test]
    fn differential_degree_is_checked() {
        let src = "vertices 1 2\narrow a : 1 -> 2 deg -1\narrow b : 1 -> 2 deg 0\narrow c : 1 -> 2 deg -1\ndiff a = b\n";
        assert!(parse_algebra(src).is_ok());
        let e = parse_algebra(&src.replace("diff a = b", "diff a = c")).unwrap_err();
        assert!(e.message.contains("expected 0"));
    }

    #[test]
    fn coefficients_merge_and_print() {
        let p = parse_algebra("vertices 1 2\narrow a : 1 -> 2 deg 0\narrow b : 1 -> 2 deg 0\nrel 1/2*a - b + 3/2*a\n").unwrap();
        assert_eq!(p.relations[0].to_string(), "2*a - b");
    }

    #[test]
    fn designators() {
        assert_eq!(parse_designator("simple(1)").unwrap(), ModuleDesignator::Simple("1".into()));
        assert_eq!(parse_designator("free(v)[-3]").unwrap(), ModuleDesignator::Free("v".into(), -3));
        assert_eq!(parse_designator("free(2)").unwrap(), ModuleDesignator::Free("2".into(), 0));
        assert_eq!(parse_designator("simples_sum").unwrap(), ModuleDesignator::SimplesSum);
        assert_eq!(parse_designator("regular[4]").unwrap(), ModuleDesignator::Regular(4));
        assert!(parse_designator("free(1) junk").is_err());
        assert!(parse_designator("cofree(1)").is_err());
    }

    #[test]
    fn module_file() {
        let src = "module m\nbasis u vertex 1 deg 0\nbasis w vertex 2 deg -1\nact a : u -> 2*w\ndiff w = 0\n";
        let m = parse_module(src).unwrap();
        assert_eq!(m.basis.len(), 2);
        assert_eq!(m.actions[0].image.terms[0].path, vec!["w".to_string()]);
        assert!(matches!(parse(src).unwrap(), Document::Module(_)));
        let e = parse_module("module m\nbasis u vertex 1 deg 0\nact a : u -> v\n").unwrap_err();
        assert!(e.message.contains("unknown basis label `v`"));
    }
}
