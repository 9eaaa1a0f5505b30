use crate::ast::{ArtProgram, AxisDir, JointStmt, PartDecl, PlaceStmt, SourceLoc, Stmt};
use kinematics_core::{JointKind, JointLimit, Vec3};
use thiserror::Error;
use urdf_io::fmt_real;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredPart(String),
    DuplicatePart(String),
    DuplicatePlacement(String),
    InvalidAxisToken(String),
    MissingJointSpec(String),
    InvalidLimit { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{loc}: {}", match .kind {
    ParseErrorKind::Syntax(m) => format!("syntax error: {m}"),
    ParseErrorKind::UndeclaredPart(p) => format!("undeclared part `{p}`"),
    ParseErrorKind::DuplicatePart(p) => format!("part `{p}` declared twice"),
    ParseErrorKind::DuplicatePlacement(p) => format!("part `{p}` placed twice"),
    ParseErrorKind::InvalidAxisToken(t) => format!("invalid axis token `{t}` (expected one of +x -x +y -y +z -z)"),
    ParseErrorKind::MissingJointSpec(m) => m.clone(),
    ParseErrorKind::InvalidLimit { lower, upper } => format!("limit lower {lower} exceeds upper {upper}"),
})]
pub struct ParseError {
    pub loc: SourceLoc,
    pub kind: ParseErrorKind,
}

fn err<T>(loc: SourceLoc, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { loc, kind })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Semi,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, SourceLoc)>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let loc = SourceLoc { line: self.line, col: self.col };
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'#' => {
                    while self.peek().is_some_and(|c| c != b'\n') {
                        self.bump();
                    }
                }
                b';' => {
                    self.bump();
                    out.push((Tok::Semi, loc));
                }
                b'"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some(b'"') => break,
                            Some(b'\n') | None => {
                                return err(
                                    loc,
                                    ParseErrorKind::Syntax("unterminated string".into()),
                                )
                            }
                            Some(c) => s.push(c as char),
                        }
                    }
                    out.push((Tok::Str(s), loc));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut s = String::new();
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                    {
                        s.push(self.bump().unwrap() as char);
                    }
                    out.push((Tok::Ident(s), loc));
                }
                c if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => {
                    let mut s = String::new();
                    // Placement axes (+z, -x, ...) share a leading sign with
                    // numbers; an alphabetic follower marks an axis token.
                    if (c == b'+' || c == b'-')
                        && self
                            .src
                            .get(self.pos + 1)
                            .is_some_and(|n| n.is_ascii_alphabetic())
                    {
                        s.push(self.bump().unwrap() as char);
                        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                            s.push(self.bump().unwrap() as char);
                        }
                        out.push((Tok::Ident(s), loc));
                        continue;
                    }
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_digit() || matches!(c, b'-' | b'+' | b'.' | b'e' | b'E'))
                    {
                        s.push(self.bump().unwrap() as char);
                    }
                    match s.parse::<f64>() {
                        Ok(v) => out.push((Tok::Num(v), loc)),
                        Err(_) => {
                            return err(loc, ParseErrorKind::Syntax(format!("bad number `{s}`")))
                        }
                    }
                }
                other => {
                    return err(
                        loc,
                        ParseErrorKind::Syntax(format!("unexpected character `{}`", other as char)),
                    )
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, SourceLoc)>,
    pos: usize,
}

impl Parser {
    fn loc(&self) -> SourceLoc {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(SourceLoc { line: 1, col: 1 })
    }

    fn next(&mut self) -> Option<&(Tok, SourceLoc)> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceLoc), ParseError> {
        let loc = self.loc();
        match self.next() {
            Some((Tok::Ident(s), l)) => Ok((s.clone(), *l)),
            _ => err(loc, ParseErrorKind::Syntax(format!("expected {what}"))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let loc = self.loc();
        match self.next() {
            Some((Tok::Ident(s), _)) if s == kw => Ok(()),
            _ => err(loc, ParseErrorKind::Syntax(format!("expected `{kw}`"))),
        }
    }

    fn expect_num(&mut self, what: &str) -> Result<f64, ParseError> {
        let loc = self.loc();
        match self.next() {
            Some((Tok::Num(v), _)) => Ok(*v),
            _ => err(loc, ParseErrorKind::Syntax(format!("expected number for {what}"))),
        }
    }

    fn expect_triple(&mut self, what: &str) -> Result<Vec3, ParseError> {
        Ok(Vec3::new(
            self.expect_num(what)?,
            self.expect_num(what)?,
            self.expect_num(what)?,
        ))
    }

    fn expect_semi(&mut self) -> Result<(), ParseError> {
        let loc = self.loc();
        match self.next() {
            Some((Tok::Semi, _)) => Ok(()),
            _ => err(loc, ParseErrorKind::Syntax("expected `;`".into())),
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.toks.get(self.pos), Some((Tok::Ident(s), _)) if s == kw)
    }
}

/// Parses program text; every statement carries its source location.
/// Part references are resolved after parsing, so declarations may appear
/// anywhere in the file.
pub fn parse_artlang(text: &str) -> Result<ArtProgram, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let mut program = ArtProgram::default();

    while p.pos < p.toks.len() {
        let (word, loc) = p.expect_ident("a statement keyword")?;
        match word.as_str() {
            "part" => {
                let (name, _) = p.expect_ident("a part name")?;
                let mesh_loc = p.loc();
                let mesh_ref = match p.next() {
                    Some((Tok::Str(s), _)) => s.clone(),
                    _ => {
                        return err(
                            mesh_loc,
                            ParseErrorKind::Syntax("expected quoted mesh reference".into()),
                        )
                    }
                };
                let mut scale = Vec3::new(1.0, 1.0, 1.0);
                if p.peek_keyword("scale") {
                    p.next();
                    scale = p.expect_triple("scale")?;
                }
                p.expect_semi()?;
                program.parts.push(PartDecl { name, mesh_ref, scale, loc });
            }
            "place" => {
                let (child, _) = p.expect_ident("a part name")?;
                p.expect_keyword("on")?;
                let (parent, _) = p.expect_ident("a part name")?;
                p.expect_keyword("axis")?;
                let (axis_tok, axis_loc) = p.expect_ident("an axis token")?;
                let Some(axis) = AxisDir::from_token(&axis_tok) else {
                    return err(axis_loc, ParseErrorKind::InvalidAxisToken(axis_tok));
                };
                let mut lateral_offset = Vec3::ZERO;
                let mut clearance = 0.0;
                if p.peek_keyword("offset") {
                    p.next();
                    lateral_offset = p.expect_triple("offset")?;
                }
                if p.peek_keyword("clearance") {
                    p.next();
                    clearance = p.expect_num("clearance")?;
                    if clearance < 0.0 {
                        return err(
                            loc,
                            ParseErrorKind::Syntax("clearance must be non-negative".into()),
                        );
                    }
                }
                p.expect_semi()?;
                program.statements.push(Stmt::Place(PlaceStmt {
                    child,
                    parent,
                    axis,
                    lateral_offset,
                    clearance,
                    loc,
                }));
            }
            "joint" => {
                let (kind_tok, kind_loc) = p.expect_ident("a joint kind")?;
                let kind = match kind_tok.as_str() {
                    "fixed" => JointKind::Fixed,
                    "prismatic" => JointKind::Prismatic,
                    "revolute" => JointKind::Revolute,
                    other => {
                        return err(
                            kind_loc,
                            ParseErrorKind::Syntax(format!("unknown joint kind `{other}`")),
                        )
                    }
                };
                let (child, _) = p.expect_ident("a part name")?;
                p.expect_keyword("to")?;
                let (parent, _) = p.expect_ident("a part name")?;
                let mut global_axis = Vec3::ZERO;
                let mut global_pivot = None;
                let mut limit = None;
                loop {
                    if p.peek_keyword("axis") {
                        p.next();
                        global_axis = p.expect_triple("axis")?;
                    } else if p.peek_keyword("pivot") {
                        p.next();
                        global_pivot = Some(p.expect_triple("pivot")?);
                    } else if p.peek_keyword("limit") {
                        p.next();
                        let lower = p.expect_num("limit lower")?;
                        let upper = p.expect_num("limit upper")?;
                        limit = Some(
                            JointLimit::new(lower, upper)
                                .ok_or(ParseError { loc, kind: ParseErrorKind::InvalidLimit { lower, upper } })?,
                        );
                    } else {
                        break;
                    }
                }
                p.expect_semi()?;

                if kind.is_movable() {
                    if global_axis.normalized().is_none() {
                        return err(
                            loc,
                            ParseErrorKind::MissingJointSpec(format!(
                                "{} joint needs a non-zero `axis`",
                                kind.as_str()
                            )),
                        );
                    }
                    if limit.is_none() {
                        return err(
                            loc,
                            ParseErrorKind::MissingJointSpec(format!(
                                "{} joint needs a `limit`",
                                kind.as_str()
                            )),
                        );
                    }
                }
                if kind == JointKind::Revolute && global_pivot.is_none() {
                    return err(
                        loc,
                        ParseErrorKind::MissingJointSpec(
                            "revolute joint needs a `pivot`".into(),
                        ),
                    );
                }
                program.statements.push(Stmt::Joint(JointStmt {
                    child,
                    parent,
                    kind,
                    global_axis,
                    global_pivot,
                    limit,
                    loc,
                }));
            }
            other => {
                return err(loc, ParseErrorKind::Syntax(format!("unknown statement `{other}`")))
            }
        }
    }

    validate(&program)?;
    Ok(program)
}

fn validate(program: &ArtProgram) -> Result<(), ParseError> {
    let mut names = std::collections::BTreeSet::new();
    for part in &program.parts {
        if !names.insert(part.name.as_str()) {
            return err(part.loc, ParseErrorKind::DuplicatePart(part.name.clone()));
        }
    }
    let mut placed = std::collections::BTreeSet::new();
    for stmt in &program.statements {
        let (child, parent, loc) = match stmt {
            Stmt::Place(s) => (&s.child, &s.parent, s.loc),
            Stmt::Joint(s) => (&s.child, &s.parent, s.loc),
        };
        for name in [child, parent] {
            if !names.contains(name.as_str()) {
                return err(loc, ParseErrorKind::UndeclaredPart(name.clone()));
            }
        }
        if let Stmt::Place(s) = stmt {
            if !placed.insert(s.child.as_str()) {
                return err(loc, ParseErrorKind::DuplicatePlacement(s.child.clone()));
            }
        }
    }
    Ok(())
}

/// Canonical source form: part declarations first, then statements in order,
/// defaults omitted. A parse → pretty-print round trip is a fixed point.
pub fn pretty_print(program: &ArtProgram) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for part in &program.parts {
        write!(out, "part {} \"{}\"", part.name, part.mesh_ref).unwrap();
        if part.scale != Vec3::new(1.0, 1.0, 1.0) {
            write!(
                out,
                " scale {} {} {}",
                fmt_real(part.scale.x),
                fmt_real(part.scale.y),
                fmt_real(part.scale.z)
            )
            .unwrap();
        }
        out.push_str(";\n");
    }
    for stmt in &program.statements {
        match stmt {
            Stmt::Place(s) => {
                write!(out, "place {} on {} axis {}", s.child, s.parent, s.axis.token()).unwrap();
                if s.lateral_offset != Vec3::ZERO {
                    write!(
                        out,
                        " offset {} {} {}",
                        fmt_real(s.lateral_offset.x),
                        fmt_real(s.lateral_offset.y),
                        fmt_real(s.lateral_offset.z)
                    )
                    .unwrap();
                }
                if s.clearance != 0.0 {
                    write!(out, " clearance {}", fmt_real(s.clearance)).unwrap();
                }
                out.push_str(";\n");
            }
            Stmt::Joint(s) => {
                write!(out, "joint {} {} to {}", s.kind.as_str(), s.child, s.parent).unwrap();
                if s.kind.is_movable() {
                    write!(
                        out,
                        " axis {} {} {}",
                        fmt_real(s.global_axis.x),
                        fmt_real(s.global_axis.y),
                        fmt_real(s.global_axis.z)
                    )
                    .unwrap();
                }
                if let Some(pivot) = s.global_pivot {
                    write!(
                        out,
                        " pivot {} {} {}",
                        fmt_real(pivot.x),
                        fmt_real(pivot.y),
                        fmt_real(pivot.z)
                    )
                    .unwrap();
                }
                if let Some(limit) = s.limit {
                    write!(out, " limit {} {}", fmt_real(limit.lower), fmt_real(limit.upper))
                        .unwrap();
                }
                out.push_str(";\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CABINET: &str = r#"
part body "cabinet/body.obj";
part drawer "cabinet/drawer.obj";
place drawer on body axis +z;
"#;

    #[test]
    fn cabinet_program_maps_directly() {
        let p = parse_artlang(CABINET).unwrap();
        assert_eq!(p.parts.len(), 2);
        assert_eq!(p.statements.len(), 1);
        match &p.statements[0] {
            Stmt::Place(s) => {
                assert_eq!(s.child, "drawer");
                assert_eq!(s.parent, "body");
                assert_eq!(s.axis, AxisDir::PosZ);
                assert_eq!(s.clearance, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_part_reports_location() {
        let text = "part body \"b.obj\";\nplace door on body axis +z;\n";
        let e = parse_artlang(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredPart("door".into()));
        assert_eq!(e.loc.line, 2);
    }

    #[test]
    fn duplicate_placement_rejected() {
        let text = "part a \"a.obj\";\npart b \"b.obj\";\nplace b on a axis +z;\nplace b on a axis +x;\n";
        let e = parse_artlang(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicatePlacement("b".into()));
        assert_eq!(e.loc.line, 4);
    }

    #[test]
    fn invalid_axis_token_rejected() {
        let text = "part a \"a.obj\";\npart b \"b.obj\";\nplace b on a axis up;\n";
        let e = parse_artlang(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::InvalidAxisToken("up".into()));
    }

    #[test]
    fn revolute_without_pivot_rejected() {
        let text = "part a \"a.obj\";\npart b \"b.obj\";\njoint revolute b to a axis 0 0 1 limit 0 1;\n";
        let e = parse_artlang(text).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MissingJointSpec(_)));
    }

    #[test]
    fn joint_statement_full_form() {
        let text = "part a \"a.obj\";\npart b \"b.obj\" scale 2 1 1;\njoint revolute b to a axis 0 0 1 pivot 0.4 0 0 limit -1.57 0;\n";
        let p = parse_artlang(text).unwrap();
        match &p.statements[0] {
            Stmt::Joint(j) => {
                assert_eq!(j.kind, JointKind::Revolute);
                assert_eq!(j.global_pivot, Some(Vec3::new(0.4, 0.0, 0.0)));
                let l = j.limit.unwrap();
                assert_eq!((l.lower, l.upper), (-1.57, 0.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(p.part("b").unwrap().scale, Vec3::new(2.0, 1.0, 1.0));
    }

    #[test]
    fn comments_and_late_declarations_accepted() {
        let text = "# a cabinet\nplace drawer on body axis +y; # snap\npart body \"b.obj\";\npart drawer \"d.obj\";\n";
        assert!(parse_artlang(text).is_ok());
    }

    #[test]
    fn pretty_print_is_fixed_point() {
        let text = "part a \"a.obj\";\npart b \"b.obj\" scale 2 1 0.5;\nplace b on a axis -y offset 0.1 0 0 clearance 0.005;\njoint prismatic b to a axis 0 1 0 limit 0 0.4;\n";
        let once = pretty_print(&parse_artlang(text).unwrap());
        let twice = pretty_print(&parse_artlang(&once).unwrap());
        assert_eq!(once, twice);
    }
}
