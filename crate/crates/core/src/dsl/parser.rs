use super::ast::*;
use super::lexer::{tokenize, Spanned, Tok};
use super::{ParseError, ParseErrorKind};

const KEYWORDS: &[&str] = &[
    "chart", "coords", "params", "domain", "sample", "metric", "form", "vector", "scalar", "distribution",
    "killing", "lee", "calabi", "end",
];

enum Section {
    None,
    Metric,
    Form(usize),
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    /// Column reported at end of line.
    eol: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol, |s| s.col)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line, self.col(), msg)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {}", t.describe())),
            None => self.err(format!("expected {wanted}, found end of line")),
        }
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
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

    fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok((s.clone(), col))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of line")),
        }
    }
}

/// Chart names may contain `-` and `.` besides identifier characters.
fn chart_name(raw: &str, line: usize) -> Result<String, ParseError> {
    let body = raw.split('#').next().unwrap_or("");
    let start = body.find("chart").map(|p| p + "chart".len()).unwrap_or(0);
    let name = body[start..].trim();
    let col = start + body[start..].len() - body[start..].trim_start().len() + 1;
    let ok = !name.is_empty()
        && name.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if !ok {
        return Err(ParseError::syntax(line, col, format!("invalid chart name `{name}`")));
    }
    Ok(name.to_string())
}

/// Parse a chart definition.
pub fn parse_chart(text: &str) -> Result<ChartSpec, ParseError> {
    Parser::default().run(text)
}

#[derive(Default)]
struct Parser {
    name: Option<String>,
    coords: Vec<String>,
    params: Vec<(String, f64)>,
    domain: Vec<Expr>,
    sample: Vec<SampleRule>,
    metric: Option<Vec<Option<Expr>>>,
    forms: Vec<(String, Vec<((usize, usize), Expr)>)>,
    vectors: Vec<VectorSpec>,
    scalars: Vec<Scalar>,
    distributions: Vec<DistributionSpec>,
    killing: Vec<KillingSpec>,
    lee: Vec<LeeSpec>,
    calabi: Vec<CalabiSpec>,
    ended: bool,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<ChartSpec, ParseError> {
        let mut section = Section::None;
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let toks = tokenize(raw, line)?;
            if toks.is_empty() {
                continue;
            }
            let mut cur = Cursor { toks: &toks, pos: 0, line, eol: raw.chars().count() + 1 };
            if self.ended {
                return Err(cur.err("content after `end`"));
            }
            let head = match cur.peek() {
                Some(Tok::Ident(s)) => s.as_str(),
                _ => return Err(cur.unexpected("keyword or binding")),
            };
            if !KEYWORDS.contains(&head) {
                match section {
                    Section::Metric => self.metric_line(&mut cur)?,
                    Section::Form(f) => self.form_line(&mut cur, f)?,
                    Section::None => return Err(cur.err(format!("unknown directive `{head}`"))),
                }
                continue;
            }
            if self.name.is_none() && head != "chart" {
                return Err(cur.err("chart must start with `chart <name>`"));
            }
            section = Section::None;
            cur.pos += 1;
            match head {
                "chart" => {
                    if self.name.is_some() {
                        return Err(ParseError::new(line, 1, ParseErrorKind::Duplicate("chart".into())));
                    }
                    self.name = Some(chart_name(raw, line)?);
                }
                "coords" => self.coords_line(&mut cur)?,
                "params" => self.params_line(&mut cur)?,
                "domain" => self.domain_line(&mut cur)?,
                "sample" => self.sample_line(&mut cur)?,
                "metric" => {
                    self.need_coords(&cur)?;
                    cur.finish()?;
                    if self.metric.is_some() {
                        return Err(ParseError::new(line, 1, ParseErrorKind::Duplicate("metric".into())));
                    }
                    let n = self.coords.len();
                    self.metric = Some(vec![None; n * (n + 1) / 2]);
                    section = Section::Metric;
                }
                "form" => {
                    self.need_coords(&cur)?;
                    let (name, col) = cur.ident()?;
                    cur.finish()?;
                    if self.forms.iter().any(|(n, _)| *n == name) {
                        return Err(ParseError::new(line, col, ParseErrorKind::Duplicate(name)));
                    }
                    self.forms.push((name, Vec::new()));
                    section = Section::Form(self.forms.len() - 1);
                }
                "vector" => self.vector_line(&mut cur)?,
                "scalar" => self.scalar_line(&mut cur)?,
                "distribution" => self.distribution_line(&mut cur)?,
                "killing" => self.killing_line(&mut cur)?,
                "lee" => self.lee_line(&mut cur)?,
                "calabi" => self.calabi_line(&mut cur)?,
                "end" => {
                    cur.finish()?;
                    self.ended = true;
                }
                _ => unreachable!("keyword table"),
            }
        }
        let eof = |msg: &str| ParseError::syntax(last_line.max(1), 1, msg);
        let name = self.name.ok_or_else(|| eof("empty chart"))?;
        if !self.ended {
            return Err(eof("missing `end`"));
        }
        let metric = self.metric.ok_or_else(|| eof("missing `metric` section"))?;
        Ok(ChartSpec {
            name,
            sample: self.sample,
            coords: self.coords,
            params: self.params,
            domain: self.domain,
            metric: metric.into_iter().map(|e| e.unwrap_or_else(Expr::zero)).collect(),
            forms: self.forms.into_iter().map(|(name, entries)| FormSpec { name, entries }).collect(),
            vectors: self.vectors,
            scalars: self.scalars,
            distributions: self.distributions,
            killing: self.killing,
            lee: self.lee,
            calabi: self.calabi,
        })
    }

    fn need_coords(&self, cur: &Cursor) -> Result<(), ParseError> {
        if self.coords.is_empty() {
            Err(ParseError::syntax(cur.line, 1, "`coords` must be declared first"))
        } else {
            Ok(())
        }
    }

    fn name_taken(&self, name: &str) -> bool {
        self.coords.iter().any(|c| c == name)
            || self.params.iter().any(|(p, _)| p == name)
            || self.scalars.iter().any(|s| s.name == name)
            || Func::from_name(name).is_some()
            || KEYWORDS.contains(&name)
    }

    fn coords_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        if !self.coords.is_empty() {
            return Err(ParseError::new(cur.line, 1, ParseErrorKind::Duplicate("coords".into())));
        }
        let mut names = Vec::new();
        while cur.peek().is_some() {
            let (name, col) = cur.ident()?;
            if self.name_taken(&name) || names.contains(&name) {
                return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(name)));
            }
            names.push(name);
        }
        if names.len() != 2 && names.len() != 4 {
            return Err(ParseError::new(
                cur.line,
                1,
                ParseErrorKind::Dimension(format!("charts have 2 or 4 coordinates, got {}", names.len())),
            ));
        }
        self.coords = names;
        Ok(())
    }

    fn params_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        while cur.peek().is_some() {
            let (name, col) = cur.ident()?;
            if self.name_taken(&name) {
                return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(name)));
            }
            cur.expect(&Tok::Eq)?;
            let expr = self.expr(cur)?;
            if expr.depends_on_coords(&self.scalars) {
                return Err(cur.err(format!("parameter `{name}` must not depend on coordinates")));
            }
            let value = self.snapshot().eval_f64(&expr, &[]);
            self.params.push((name, value));
        }
        Ok(())
    }

    fn domain_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        self.need_coords(cur)?;
        loop {
            let e = self.expr(cur)?;
            self.domain.push(e);
            if !cur.eat(&Tok::Semi) {
                break;
            }
        }
        cur.finish()
    }

    fn coord_ref(&self, cur: &mut Cursor) -> Result<(usize, usize), ParseError> {
        let (name, col) = cur.ident()?;
        let found = self.coords.iter().position(|c| *c == name);
        Ok((Self::lookup(cur, col, &name, found)?, col))
    }

    // sample <coord> = (lo, hi)  |  sample polar <x> <y> = (rlo, rhi)
    fn sample_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        self.need_coords(cur)?;
        let polar = cur.peek() == Some(&Tok::Ident("polar".into())) && !self.coords.iter().any(|c| c == "polar");
        if polar {
            cur.pos += 1;
        }
        let (first, col) = self.coord_ref(cur)?;
        let second = if polar { Some(self.coord_ref(cur)?.0) } else { None };
        cur.expect(&Tok::Eq)?;
        cur.expect(&Tok::LParen)?;
        let lo = self.expr(cur)?;
        cur.expect(&Tok::Comma)?;
        let hi = self.expr(cur)?;
        cur.expect(&Tok::RParen)?;
        cur.finish()?;
        if lo.depends_on_coords(&self.scalars) || hi.depends_on_coords(&self.scalars) {
            return Err(ParseError::syntax(cur.line, col, "sample bounds must not depend on coordinates"));
        }
        let rule = match second {
            Some(y) => SampleRule::Polar { x: first, y, lo, hi },
            None => SampleRule::Interval { coord: first, lo, hi },
        };
        for c in rule.coords() {
            if self.sample.iter().any(|r| r.coords().contains(&c)) || second == Some(first) {
                let name = format!("sample {}", self.coords[c]);
                return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(name)));
            }
        }
        self.sample.push(rule);
        Ok(())
    }

    /// `[i, j]` with numeric or coordinate-name indices.
    fn index_pair(&self, cur: &mut Cursor) -> Result<(usize, usize, usize), ParseError> {
        cur.expect(&Tok::LBracket)?;
        let col = cur.col();
        let i = self.index(cur)?;
        cur.expect(&Tok::Comma)?;
        let j = self.index(cur)?;
        cur.expect(&Tok::RBracket)?;
        Ok((i, j, col))
    }

    fn index(&self, cur: &mut Cursor) -> Result<usize, ParseError> {
        let col = cur.col();
        let n = self.coords.len();
        let i = match cur.bump() {
            Some(Tok::Number(v, true)) => *v as usize,
            Some(Tok::Ident(s)) => self
                .coords
                .iter()
                .position(|c| c == s)
                .ok_or_else(|| ParseError::new(cur.line, col, ParseErrorKind::UnknownIdentifier(s.clone())))?,
            _ => return Err(ParseError::syntax(cur.line, col, "expected index")),
        };
        if i >= n {
            return Err(ParseError::new(
                cur.line,
                col,
                ParseErrorKind::Dimension(format!("index {i} out of range for {n} coordinates")),
            ));
        }
        Ok(i)
    }

    fn metric_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (key, _) = cur.ident()?;
        if key != "g" {
            return Err(ParseError::syntax(cur.line, 1, format!("expected `g[i,j]` in metric, found `{key}`")));
        }
        let (i, j, col) = self.index_pair(cur)?;
        cur.expect(&Tok::Eq)?;
        let e = self.expr(cur)?;
        cur.finish()?;
        let n = self.coords.len();
        let slot = &mut self.metric.as_mut().expect("metric section open")[ChartSpec::tri_index(n, i, j)];
        if slot.is_some() {
            return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(format!("g[{i},{j}]"))));
        }
        *slot = Some(e);
        Ok(())
    }

    fn form_line(&mut self, cur: &mut Cursor, f: usize) -> Result<(), ParseError> {
        let (key, _) = cur.ident()?;
        if key != "w" {
            return Err(ParseError::syntax(cur.line, 1, format!("expected `w[i,j]` in form, found `{key}`")));
        }
        let (i, j, col) = self.index_pair(cur)?;
        cur.expect(&Tok::Eq)?;
        let e = self.expr(cur)?;
        cur.finish()?;
        if i == j {
            return Err(ParseError::syntax(cur.line, col, "2-form diagonal entries are zero"));
        }
        let (key, e) = if i < j { ((i, j), e) } else { ((j, i), Expr::Neg(Box::new(e))) };
        let entries = &mut self.forms[f].1;
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(format!("w[{},{}]", key.0, key.1))));
        }
        entries.push((key, e));
        entries.sort_by_key(|(k, _)| *k);
        Ok(())
    }

    fn vector_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        self.need_coords(cur)?;
        let (name, col) = cur.ident()?;
        if self.vectors.iter().any(|v| v.name == name) {
            return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(name)));
        }
        cur.expect(&Tok::Eq)?;
        cur.expect(&Tok::LParen)?;
        let mut components = vec![self.expr(cur)?];
        while cur.eat(&Tok::Comma) {
            components.push(self.expr(cur)?);
        }
        cur.expect(&Tok::RParen)?;
        cur.finish()?;
        if components.len() != self.coords.len() {
            return Err(ParseError::new(
                cur.line,
                col,
                ParseErrorKind::Dimension(format!(
                    "vector `{name}` has {} components, chart has {} coordinates",
                    components.len(),
                    self.coords.len()
                )),
            ));
        }
        self.vectors.push(VectorSpec { name, components });
        Ok(())
    }

    fn scalar_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        self.need_coords(cur)?;
        let (name, col) = cur.ident()?;
        if self.name_taken(&name) {
            return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(name)));
        }
        cur.expect(&Tok::Eq)?;
        let expr = self.expr(cur)?;
        cur.finish()?;
        self.scalars.push(Scalar { name, expr });
        Ok(())
    }

    fn lookup<T>(
        cur: &Cursor,
        col: usize,
        name: &str,
        found: Option<T>,
    ) -> Result<T, ParseError> {
        found.ok_or_else(|| ParseError::new(cur.line, col, ParseErrorKind::UnknownIdentifier(name.to_string())))
    }

    fn vector_ref(&self, cur: &mut Cursor) -> Result<usize, ParseError> {
        let (name, col) = cur.ident()?;
        let found = self.vectors.iter().position(|v| v.name == name);
        Self::lookup(cur, col, &name, found)
    }

    fn scalar_ref(&self, cur: &mut Cursor) -> Result<usize, ParseError> {
        let (name, col) = cur.ident()?;
        let found = self.scalars.iter().position(|s| s.name == name);
        Self::lookup(cur, col, &name, found)
    }

    fn distribution_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (name, col) = cur.ident()?;
        if self.distributions.iter().any(|d| d.name == name) {
            return Err(ParseError::new(cur.line, col, ParseErrorKind::Duplicate(name)));
        }
        cur.expect(&Tok::Eq)?;
        let first = self.vector_ref(cur)?;
        cur.expect(&Tok::Comma)?;
        let second = if cur.peek() == Some(&Tok::Ident("J".into())) && cur.toks.len() > cur.pos + 1 {
            cur.pos += 1;
            SpanVector::JOf(self.vector_ref(cur)?)
        } else {
            SpanVector::Field(self.vector_ref(cur)?)
        };
        cur.finish()?;
        self.distributions.push(DistributionSpec { name, first, second });
        Ok(())
    }

    fn killing_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let vector = self.vector_ref(cur)?;
        let potential = if cur.peek().is_some() { Some(self.scalar_ref(cur)?) } else { None };
        cur.finish()?;
        self.killing.push(KillingSpec { vector, potential });
        Ok(())
    }

    fn lee_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let (fname, col) = cur.ident()?;
        let found = self.forms.iter().position(|(n, _)| *n == fname);
        let form = Self::lookup(cur, col, &fname, found)?;
        let potential = self.scalar_ref(cur)?;
        cur.finish()?;
        self.lee.push(LeeSpec { form, potential });
        Ok(())
    }

    fn calabi_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let sign = match cur.bump() {
            Some(Tok::Plus) => CalabiSign::Plus,
            Some(Tok::Minus) => CalabiSign::Minus,
            _ => {
                cur.pos -= 1;
                return Err(cur.unexpected("`+` or `-`"));
            }
        };
        let potential = self.scalar_ref(cur)?;
        cur.finish()?;
        self.calabi.push(CalabiSpec { sign, potential });
        Ok(())
    }

    /// Partial chart used to evaluate parameter expressions during parsing.
    fn snapshot(&self) -> ChartSpec {
        ChartSpec {
            name: String::new(),
            coords: Vec::new(),
            params: self.params.clone(),
            domain: Vec::new(),
            sample: Vec::new(),
            metric: Vec::new(),
            forms: Vec::new(),
            vectors: Vec::new(),
            scalars: self.scalars.clone(),
            distributions: Vec::new(),
            killing: Vec::new(),
            lee: Vec::new(),
            calabi: Vec::new(),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let mut lhs = self.term(cur)?;
        loop {
            if cur.eat(&Tok::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term(cur)?));
            } else if cur.eat(&Tok::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term(cur)?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let mut lhs = self.unary(cur)?;
        loop {
            if cur.eat(&Tok::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary(cur)?));
            } else if cur.eat(&Tok::Slash) {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary(cur)?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        if cur.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary(cur)?)));
        }
        self.power(cur)
    }

    // power := primary ('^' '-'? integer)?
    fn power(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let base = self.primary(cur)?;
        if !cur.eat(&Tok::Caret) {
            return Ok(base);
        }
        let negative = cur.eat(&Tok::Minus);
        match cur.peek() {
            Some(Tok::Number(v, true)) if *v <= i32::MAX as f64 => {
                cur.pos += 1;
                let n = *v as i32;
                Ok(Expr::PowInt(Box::new(base), if negative { -n } else { n }))
            }
            _ => Err(cur.unexpected("integer exponent")),
        }
    }

    // primary := number | ident | func '(' expr ')' | '(' expr ')'
    fn primary(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let col = cur.col();
        match cur.peek() {
            Some(Tok::Number(v, _)) => {
                cur.pos += 1;
                Ok(Expr::Const(*v))
            }
            Some(Tok::LParen) => {
                cur.pos += 1;
                let e = self.expr(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                cur.pos += 1;
                if let Some(f) = Func::from_name(name) {
                    cur.expect(&Tok::LParen)?;
                    let e = self.expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    return Ok(Expr::Call(f, Box::new(e)));
                }
                if let Some(i) = self.coords.iter().position(|c| c == name) {
                    return Ok(Expr::Coord(i));
                }
                if let Some(i) = self.params.iter().position(|(p, _)| p == name) {
                    return Ok(Expr::Param(i));
                }
                if let Some(i) = self.scalars.iter().position(|s| s.name == *name) {
                    return Ok(Expr::Scalar(i));
                }
                Err(ParseError::new(cur.line, col, ParseErrorKind::UnknownIdentifier(name.clone())))
            }
            _ => Err(cur.unexpected("expression")),
        }
    }
}
