use super::expr::{parse_expr_at, parse_field_at, FieldExpr};
use super::*;
use crate::cas::is_parameter_name;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

const GLOBAL_NAMES: [&str; 3] = ["X", "Y", "Z"];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Header,
    Charts,
    Transitions,
    Components,
    Intersection,
    Generators,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    indented: bool,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> AtlasError {
    AtlasError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn unknown(kind: &str, name: &str, line: usize) -> AtlasError {
    AtlasError::UnknownReference {
        kind: kind.to_string(),
        name: name.to_string(),
        line,
    }
}

fn violation(invariant: impl Into<String>, location: impl Into<String>) -> AtlasError {
    AtlasError::InvariantViolation {
        invariant: invariant.into(),
        location: location.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// Column (1-based) of `part` inside `line`, both slices of the same buffer.
fn col_of(line: &str, part: &str) -> usize {
    let off = part.as_ptr() as usize - line.as_ptr() as usize;
    line[..off].chars().count() + 1
}

fn trimmed<'a>(s: &'a str) -> &'a str {
    s.trim()
}

struct Record {
    line: usize,
    names: [String; 2],
}

pub fn load_atlas_file(path: impl AsRef<Path>) -> Result<Atlas, AtlasError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
        perr(0, 0, format!("cannot read {}: {}", path.as_ref().display(), e))
    })?;
    load_atlas(&text)
}

pub fn load_atlas(document: &str) -> Result<Atlas, AtlasError> {
    let mut lines = Vec::new();
    for (i, raw) in document.lines().enumerate() {
        if !raw.is_ascii() {
            let col = raw.chars().position(|c| !c.is_ascii()).unwrap_or(0) + 1;
            return Err(perr(i + 1, col, "non-ASCII character"));
        }
        let text = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if text.trim().is_empty() {
            continue;
        }
        lines.push(Line {
            no: i + 1,
            text,
            indented: text.starts_with(' ') || text.starts_with('\t'),
        });
    }

    let mut section = Section::Header;
    let mut header: HashMap<String, (String, usize)> = HashMap::new();
    let mut comments = Vec::new();
    let mut charts: Vec<Chart> = Vec::new();
    let mut chart_lines: Vec<Record> = Vec::new();
    let mut transitions: Vec<Transition> = Vec::new();
    let mut transition_lines: Vec<Record> = Vec::new();
    let mut components: Vec<Component> = Vec::new();
    let mut component_lines: Vec<Record> = Vec::new();
    let mut principal_seen: Vec<bool> = Vec::new();
    let mut intersection: Vec<(String, Vec<i64>, usize)> = Vec::new();
    let mut theta: Vec<(ThetaEntry, usize)> = Vec::new();
    let mut eta: Vec<(EtaEntry, usize)> = Vec::new();

    for l in &lines {
        let t = l.text.trim();
        if t.starts_with('[') {
            let name = t
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| perr(l.no, col_of(l.text, t), "malformed section header"))?;
            section = match name.trim() {
                "charts" => Section::Charts,
                "transitions" => Section::Transitions,
                "components" => Section::Components,
                "intersection" => Section::Intersection,
                "generators" => Section::Generators,
                other => {
                    return Err(perr(
                        l.no,
                        col_of(l.text, t),
                        format!("unknown section '{}'", other),
                    ))
                }
            };
            continue;
        }
        match section {
            Section::Header => {
                let (k, v) = t
                    .split_once('=')
                    .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected key = value"))?;
                let (k, v) = (k.trim(), v.trim());
                if k == "note" {
                    comments.push(v.to_string());
                } else if header.insert(k.to_string(), (v.to_string(), l.no)).is_some() {
                    return Err(perr(l.no, col_of(l.text, t), format!("duplicate key '{}'", k)));
                }
            }
            Section::Charts => {
                if l.indented {
                    let chart = charts
                        .last_mut()
                        .ok_or_else(|| perr(l.no, col_of(l.text, t), "continuation without chart"))?;
                    parse_chart_detail(l, t, chart)?;
                } else {
                    charts.push(parse_chart_line(l, t)?);
                    chart_lines.push(Record { line: l.no, names: Default::default() });
                }
            }
            Section::Transitions => {
                if l.indented {
                    let tr = transitions.last_mut().ok_or_else(|| {
                        perr(l.no, col_of(l.text, t), "continuation without transition")
                    })?;
                    let note = t
                        .strip_prefix("note")
                        .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected note"))?;
                    tr.note = Some(note.trim().to_string());
                } else {
                    let (tr, names) = parse_transition_line(l, t)?;
                    transitions.push(tr);
                    transition_lines.push(Record { line: l.no, names });
                }
            }
            Section::Components => {
                if l.indented {
                    let comp = components.last_mut().ok_or_else(|| {
                        perr(l.no, col_of(l.text, t), "continuation without component")
                    })?;
                    let seen = principal_seen.last_mut().expect("parallel vectors");
                    parse_component_detail(l, t, comp, seen)?;
                } else {
                    components.push(parse_component_line(l, t)?);
                    component_lines.push(Record { line: l.no, names: Default::default() });
                    principal_seen.push(false);
                }
            }
            Section::Intersection => {
                let (label, rest) = t
                    .split_once(':')
                    .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected <component>: row"))?;
                let mut row = Vec::new();
                for tok in rest.split_whitespace() {
                    let v: i64 = tok
                        .parse()
                        .map_err(|_| perr(l.no, col_of(l.text, tok), "expected integer"))?;
                    row.push(v);
                }
                intersection.push((label.trim().to_string(), row, l.no));
            }
            Section::Generators => parse_generator_line(l, t, &mut theta, &mut eta)?,
        }
    }

    let get = |k: &str| -> Result<(String, usize), AtlasError> {
        header
            .get(k)
            .cloned()
            .ok_or_else(|| violation(format!("header key '{}' present", k), "header"))
    };
    let name = get("name")?.0;
    let type_label = get("type")?.0;
    let (class, class_line) = get("class")?;
    let class = match class.as_str() {
        "additive" => AtlasClass::Additive,
        "multiplicative" => AtlasClass::Multiplicative,
        other => {
            return Err(perr(
                class_line,
                1,
                format!("class must be additive or multiplicative, got '{}'", other),
            ))
        }
    };
    let (twist, twist_line) = get("twist")?;
    let twist_mode = match twist.as_str() {
        "fixed" => TwistMode::Fixed,
        "n" => TwistMode::Variable,
        other => {
            return Err(perr(
                twist_line,
                1,
                format!("twist must be fixed or n, got '{}'", other),
            ))
        }
    };
    for k in header.keys() {
        if !["name", "type", "class", "twist"].contains(&k.as_str()) {
            let line = header[k].1;
            return Err(perr(line, 1, format!("unknown header key '{}'", k)));
        }
    }

    // Charts.
    let mut coord_owner: HashMap<String, String> = HashMap::new();
    let mut chart_ids = HashSet::new();
    for (c, rec) in charts.iter().zip(&chart_lines) {
        if !chart_ids.insert(c.id.clone()) {
            return Err(violation("chart ids are unique", format!("chart {} (line {})", c.id, rec.line)));
        }
        if c.coordinates[0] == c.coordinates[1] {
            return Err(violation("exactly two distinct coordinates", format!("chart {}", c.id)));
        }
        for v in &c.coordinates {
            if is_parameter_name(v) || GLOBAL_NAMES.contains(&v.as_str()) || v == "n" {
                return Err(violation("coordinates are not reserved names", format!("chart {}", c.id)));
            }
            if let Some(other) = coord_owner.insert(v.clone(), c.id.clone()) {
                return Err(violation(
                    "coordinate names are unique across charts",
                    format!("{} in charts {} and {}", v, other, c.id),
                ));
            }
        }
        let allowed: BTreeSet<String> = c.coordinates.iter().cloned().collect();
        for inv in &c.inverted {
            check_identifiers(&inv.identifiers(), &allowed, rec.line)?;
            if inv.identifiers().iter().all(|s| is_parameter_name(s)) {
                return Err(violation(
                    "inverted polynomials are nonconstant in the chart coordinates",
                    format!("chart {}", c.id),
                ));
            }
            if inv.has_twist() {
                return Err(violation("no twist in chart data", format!("chart {}", c.id)));
            }
        }
        if let Some(g) = &c.globals {
            let allowed: BTreeSet<String> = GLOBAL_NAMES.iter().map(|s| s.to_string()).collect();
            for e in g {
                check_identifiers(&e.identifiers(), &allowed, rec.line)?;
            }
        }
    }

    // Transitions.
    let mut seen_pairs = HashSet::new();
    for (t, rec) in transitions.iter_mut().zip(&transition_lines) {
        let dst = charts
            .iter()
            .find(|c| c.id == t.target)
            .ok_or_else(|| unknown("chart", &t.target, rec.line))?;
        if rec.names == dst.coordinates {
        } else if rec.names[0] == dst.coordinates[1] && rec.names[1] == dst.coordinates[0] {
            t.formulas.swap(0, 1);
        } else {
            return Err(violation(
                "transition formulas assign the target coordinates",
                format!("{} -> {} (line {})", t.source, t.target, rec.line),
            ));
        }
        let src = charts
            .iter()
            .find(|c| c.id == t.source)
            .ok_or_else(|| unknown("chart", &t.source, rec.line))?;
        if t.source == t.target {
            return Err(violation("transitions join distinct charts", format!("line {}", rec.line)));
        }
        if !seen_pairs.insert((t.source.clone(), t.target.clone())) {
            return Err(violation(
                "at most one transition per ordered chart pair",
                format!("{} -> {} (line {})", t.source, t.target, rec.line),
            ));
        }
        let allowed: BTreeSet<String> = src.coordinates.iter().cloned().collect();
        for f in &t.formulas {
            check_identifiers(&f.identifiers(), &allowed, rec.line)?;
        }
    }

    // Components.
    let mut comp_ids = HashSet::new();
    for ((c, rec), principal_found) in components.iter().zip(&component_lines).zip(&principal_seen) {
        let loc = format!("component {} (line {})", c.id, rec.line);
        if !comp_ids.insert(c.id.clone()) {
            return Err(violation("component ids are unique", loc));
        }
        if c.multiplicity == 0 {
            return Err(violation("multiplicity is positive", loc));
        }
        if c.t_count == 0 {
            return Err(violation("t_i >= 1", loc));
        }
        if c.local_equations.is_empty() {
            return Err(violation("component has local equations", loc));
        }
        let mut seen = HashSet::new();
        for (ch, coord) in &c.local_equations {
            let chart = charts
                .iter()
                .find(|x| &x.id == ch)
                .ok_or_else(|| unknown("chart", ch, rec.line))?;
            if !chart.coordinates.contains(coord) {
                return Err(violation(
                    "each local equation is a coordinate of the named chart",
                    format!("{} on {}", c.id, ch),
                ));
            }
            if !seen.insert(ch.clone()) {
                return Err(violation("one local equation per chart", format!("{} on {}", c.id, ch)));
            }
        }
        let members: HashSet<&str> = c.charts().collect();
        for (a, b) in &c.nerve {
            for x in [a, b] {
                if !chart_ids.contains(x) {
                    return Err(unknown("chart", x, rec.line));
                }
                if !members.contains(x.as_str()) {
                    return Err(violation(
                        "nerve charts belong to the component's cover",
                        format!("{} nerve {}-{}", c.id, a, b),
                    ));
                }
            }
            if a == b {
                return Err(violation("nerve edges join distinct charts", loc));
            }
        }
        if !nerve_connected(c) {
            return Err(violation("the nerve is connected and covers the component", loc));
        }
        if !principal_found {
            return Err(violation("a principal pair is designated", loc));
        }
    }
    if components.len() < 2 {
        return Err(violation("at least two components", "components"));
    }

    // Intersection.
    if intersection.len() != components.len() {
        return Err(violation(
            "intersection matrix is r x r",
            format!("{} rows for {} components", intersection.len(), components.len()),
        ));
    }
    let mut matrix = Vec::new();
    for ((label, row, line), comp) in intersection.iter().zip(&components) {
        if label != &comp.id {
            if comp_ids.contains(label) {
                return Err(violation(
                    "intersection rows follow component order",
                    format!("line {}", line),
                ));
            }
            return Err(unknown("component", label, *line));
        }
        if row.len() != components.len() {
            return Err(violation("intersection matrix is r x r", format!("line {}", line)));
        }
        matrix.push(row.clone());
    }

    // Generators.
    for (e, line) in &theta {
        let comp = components
            .iter()
            .find(|c| c.id == e.component)
            .ok_or_else(|| unknown("component", &e.component, *line))?;
        let chart = charts
            .iter()
            .find(|c| c.id == e.chart)
            .ok_or_else(|| unknown("chart", &e.chart, *line))?;
        if comp.equation_on(&e.chart).is_none() {
            return Err(violation(
                "generator charts belong to the component's cover",
                format!("theta {} @ {}", e.component, e.chart),
            ));
        }
        check_field(&e.field, chart, *line)?;
    }
    for (e, line) in &eta {
        let comp = components
            .iter()
            .find(|c| c.id == e.component)
            .ok_or_else(|| unknown("component", &e.component, *line))?;
        for x in [&e.overlap.0, &e.overlap.1] {
            if !chart_ids.contains(x) {
                return Err(unknown("chart", x, *line));
            }
        }
        if !comp.nerve.contains(&e.overlap) {
            return Err(violation(
                "generator overlaps appear in the component's nerve",
                format!("eta {} @ {}-{}", e.component, e.overlap.0, e.overlap.1),
            ));
        }
        let chart = charts.iter().find(|c| c.id == e.overlap.1).expect("checked");
        check_field(&e.field, chart, *line)?;
    }
    let atlas = Atlas {
        name,
        type_label,
        class,
        twist_mode,
        instantiated: None,
        comments,
        charts,
        transitions,
        components,
        intersection: matrix,
        generators: GeneratorTable {
            theta: theta.into_iter().map(|x| x.0).collect(),
            eta: eta.into_iter().map(|x| x.0).collect(),
        },
    };
    if atlas.twist_mode == TwistMode::Fixed && atlas.has_twist_symbol() {
        return Err(violation("fixed-twist atlas has no twist exponents", "generators"));
    }
    Ok(atlas)
}

fn check_identifiers(ids: &BTreeSet<String>, allowed: &BTreeSet<String>, line: usize) -> Result<(), AtlasError> {
    for id in ids {
        if !allowed.contains(id) && !is_parameter_name(id) {
            return Err(unknown("identifier", id, line));
        }
    }
    Ok(())
}

fn check_field(f: &FieldExpr, chart: &Chart, line: usize) -> Result<(), AtlasError> {
    let allowed: BTreeSet<String> = chart.coordinates.iter().cloned().collect();
    let mut seen = HashSet::new();
    for (e, coord) in &f.terms {
        if !allowed.contains(coord) {
            return Err(unknown("coordinate", coord, line));
        }
        if !seen.insert(coord) {
            return Err(violation("one term per coordinate direction", format!("line {}", line)));
        }
        check_identifiers(&e.identifiers(), &allowed, line)?;
    }
    Ok(())
}

fn nerve_connected(c: &Component) -> bool {
    let charts: Vec<&str> = c.charts().collect();
    if charts.len() == 1 {
        return true;
    }
    let mut reached: HashSet<&str> = HashSet::new();
    reached.insert(charts[0]);
    loop {
        let before = reached.len();
        for (a, b) in &c.nerve {
            if reached.contains(a.as_str()) || reached.contains(b.as_str()) {
                reached.insert(a.as_str());
                reached.insert(b.as_str());
            }
        }
        if reached.len() == before {
            break;
        }
    }
    charts.iter().all(|c| reached.contains(c))
}

fn parse_chart_line(l: &Line, t: &str) -> Result<Chart, AtlasError> {
    let (id, rest) = t
        .split_once('=')
        .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected <chart> = (<coord>, <coord>)"))?;
    let id = id.trim();
    if !is_ident(id) {
        return Err(perr(l.no, col_of(l.text, t), "invalid chart id"));
    }
    let rest = rest.trim();
    let inner = rest
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| perr(l.no, col_of(l.text, rest), "expected (<coord>, <coord>)"))?;
    let coords: Vec<&str> = inner.split(',').map(trimmed).collect();
    if coords.len() != 2 || !coords.iter().all(|c| is_ident(c)) {
        return Err(perr(l.no, col_of(l.text, rest), "expected two coordinates"));
    }
    Ok(Chart {
        id: id.to_string(),
        coordinates: [coords[0].to_string(), coords[1].to_string()],
        inverted: Vec::new(),
        globals: None,
    })
}

fn parse_chart_detail(l: &Line, t: &str, chart: &mut Chart) -> Result<(), AtlasError> {
    if let Some(rest) = t.strip_prefix("invert ") {
        let e = parse_expr_at(rest, l.no, col_of(l.text, rest))?;
        chart.inverted.push(e);
        return Ok(());
    }
    if let Some(rest) = t.strip_prefix("global ") {
        let parts: Vec<&str> = rest.split(';').collect();
        if parts.len() != 2 {
            return Err(perr(l.no, col_of(l.text, rest), "expected two global formulas"));
        }
        let mut exprs: Vec<Expr> = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            let (lhs, rhs) = part
                .split_once('=')
                .ok_or_else(|| perr(l.no, col_of(l.text, part), "expected <coord> = <expr>"))?;
            if lhs.trim() != chart.coordinates[i] {
                return Err(perr(
                    l.no,
                    col_of(l.text, lhs),
                    format!("expected coordinate {}", chart.coordinates[i]),
                ));
            }
            exprs.push(parse_expr_at(rhs, l.no, col_of(l.text, rhs))?);
        }
        let second = exprs.pop().expect("two");
        let first = exprs.pop().expect("two");
        chart.globals = Some([first, second]);
        return Ok(());
    }
    Err(perr(l.no, col_of(l.text, t), "expected invert or global"))
}

fn parse_transition_line(l: &Line, t: &str) -> Result<(Transition, [String; 2]), AtlasError> {
    let (head, body) = t
        .split_once(':')
        .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected <source> -> <target>: ..."))?;
    let (src, dst) = head
        .split_once("->")
        .ok_or_else(|| perr(l.no, col_of(l.text, head), "expected ->"))?;
    let (src, dst) = (src.trim(), dst.trim());
    if !is_ident(src) || !is_ident(dst) {
        return Err(perr(l.no, col_of(l.text, head), "invalid chart id"));
    }
    let parts: Vec<&str> = body.split(';').collect();
    if parts.len() != 2 {
        return Err(perr(l.no, col_of(l.text, body), "expected two formulas separated by ';'"));
    }
    let mut lhs_names = Vec::new();
    let mut exprs = Vec::new();
    for part in parts {
        let (lhs, rhs) = part
            .split_once('=')
            .ok_or_else(|| perr(l.no, col_of(l.text, part), "expected <coord> = <expr>"))?;
        lhs_names.push((lhs.trim().to_string(), col_of(l.text, lhs)));
        exprs.push(parse_expr_at(rhs, l.no, col_of(l.text, rhs))?);
    }
    Ok((
        Transition {
            source: src.to_string(),
            target: dst.to_string(),
            formulas: [exprs[0].clone(), exprs[1].clone()],
            note: None,
        },
        [lhs_names[0].0.clone(), lhs_names[1].0.clone()],
    ))
}

fn parse_component_line(l: &Line, t: &str) -> Result<Component, AtlasError> {
    let (id, rest) = t
        .split_once(':')
        .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected <component>: ..."))?;
    let id = id.trim();
    if !is_ident(id) {
        return Err(perr(l.no, col_of(l.text, t), "invalid component id"));
    }
    let mut multiplicity = None;
    let mut t_count = None;
    for part in rest.split(';') {
        if part.trim().is_empty() {
            continue;
        }
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| perr(l.no, col_of(l.text, part), "expected key = value"))?;
        let val: u32 = v
            .trim()
            .parse()
            .map_err(|_| perr(l.no, col_of(l.text, v), "expected nonnegative integer"))?;
        match k.trim() {
            "multiplicity" => multiplicity = Some(val),
            "meets" => t_count = Some(val),
            other => {
                return Err(perr(
                    l.no,
                    col_of(l.text, k),
                    format!("unknown component key '{}'", other),
                ))
            }
        }
    }
    Ok(Component {
        id: id.to_string(),
        multiplicity: multiplicity
            .ok_or_else(|| perr(l.no, col_of(l.text, rest), "missing multiplicity"))?,
        t_count: t_count.ok_or_else(|| perr(l.no, col_of(l.text, rest), "missing meets"))?,
        local_equations: Vec::new(),
        nerve: Vec::new(),
        principal: (String::new(), String::new()),
    })
}

fn parse_pair(l: &Line, s: &str) -> Result<(String, String), AtlasError> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| perr(l.no, col_of(l.text, s), "expected <chart>-<chart>"))?;
    let (a, b) = (a.trim(), b.trim());
    if !is_ident(a) || !is_ident(b) {
        return Err(perr(l.no, col_of(l.text, s), "invalid chart pair"));
    }
    Ok((a.to_string(), b.to_string()))
}

fn parse_component_detail(l: &Line, t: &str, comp: &mut Component, principal_seen: &mut bool) -> Result<(), AtlasError> {
    if let Some(rest) = t.strip_prefix("nerve ") {
        let rest = rest.trim();
        let (pair_text, principal) = match rest.strip_suffix("principal") {
            Some(p) => (p.trim(), true),
            None => (rest, false),
        };
        let pair = parse_pair(l, pair_text)?;
        if principal {
            if *principal_seen {
                return Err(perr(l.no, col_of(l.text, t), "second principal pair"));
            }
            *principal_seen = true;
            comp.principal = pair.clone();
        }
        comp.nerve.push(pair);
        return Ok(());
    }
    let (chart, coord) = t
        .split_once(':')
        .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected <chart>: <coord> or nerve"))?;
    let (chart, coord) = (chart.trim(), coord.trim());
    if !is_ident(chart) || !is_ident(coord) {
        return Err(perr(l.no, col_of(l.text, t), "invalid local equation"));
    }
    comp.local_equations.push((chart.to_string(), coord.to_string()));
    Ok(())
}

fn parse_generator_line(
    l: &Line,
    t: &str,
    theta: &mut Vec<(ThetaEntry, usize)>,
    eta: &mut Vec<(EtaEntry, usize)>,
) -> Result<(), AtlasError> {
    let (kind, rest) = t
        .split_once(' ')
        .ok_or_else(|| perr(l.no, col_of(l.text, t), "expected theta or eta"))?;
    let (head, body) = rest
        .split_once(':')
        .ok_or_else(|| perr(l.no, col_of(l.text, rest), "expected ':'"))?;
    let (comp, site) = head
        .split_once('@')
        .ok_or_else(|| perr(l.no, col_of(l.text, head), "expected <component> @ <site>"))?;
    let comp = comp.trim();
    if !is_ident(comp) {
        return Err(perr(l.no, col_of(l.text, head), "invalid component id"));
    }
    let field = parse_field_at(body, l.no, col_of(l.text, body))?;
    match kind {
        "theta" => {
            let chart = site.trim();
            if !is_ident(chart) {
                return Err(perr(l.no, col_of(l.text, site), "invalid chart id"));
            }
            theta.push((
                ThetaEntry {
                    component: comp.to_string(),
                    chart: chart.to_string(),
                    field,
                },
                l.no,
            ));
        }
        "eta" => {
            let overlap = parse_pair(l, site)?;
            eta.push((
                EtaEntry {
                    component: comp.to_string(),
                    overlap,
                    field,
                },
                l.no,
            ));
        }
        _ => return Err(perr(l.no, col_of(l.text, t), "expected theta or eta")),
    }
    Ok(())
}

/// Canonical serialization; `load_atlas(&render(a))` reproduces `a`.
pub fn render(atlas: &Atlas) -> String {
    let mut s = String::new();
    s.push_str(&format!("name = {}\n", atlas.name));
    s.push_str(&format!("type = {}\n", atlas.type_label));
    s.push_str(&format!("class = {}\n", atlas.class.label()));
    s.push_str(&format!(
        "twist = {}\n",
        match atlas.twist_mode {
            TwistMode::Fixed => "fixed",
            TwistMode::Variable => "n",
        }
    ));
    for c in &atlas.comments {
        s.push_str(&format!("note = {}\n", c));
    }
    s.push_str("\n[charts]\n");
    for c in &atlas.charts {
        s.push_str(&format!("{} = ({}, {})\n", c.id, c.coordinates[0], c.coordinates[1]));
        for inv in &c.inverted {
            s.push_str(&format!("  invert {}\n", inv));
        }
        if let Some(g) = &c.globals {
            s.push_str(&format!(
                "  global {} = {}; {} = {}\n",
                c.coordinates[0], g[0], c.coordinates[1], g[1]
            ));
        }
    }
    s.push_str("\n[transitions]\n");
    for t in &atlas.transitions {
        let target = atlas.chart(&t.target).expect("validated");
        s.push_str(&format!(
            "{} -> {}: {} = {}; {} = {}\n",
            t.source, t.target, target.coordinates[0], t.formulas[0], target.coordinates[1], t.formulas[1]
        ));
        if let Some(n) = &t.note {
            s.push_str(&format!("  note {}\n", n));
        }
    }
    s.push_str("\n[components]\n");
    for c in &atlas.components {
        s.push_str(&format!("{}: multiplicity = {}; meets = {}\n", c.id, c.multiplicity, c.t_count));
        for (ch, coord) in &c.local_equations {
            s.push_str(&format!("  {}: {}\n", ch, coord));
        }
        for (a, b) in &c.nerve {
            let tag = if (a, b) == (&c.principal.0, &c.principal.1) {
                " principal"
            } else {
                ""
            };
            s.push_str(&format!("  nerve {}-{}{}\n", a, b, tag));
        }
    }
    s.push_str("\n[intersection]\n");
    for (c, row) in atlas.components.iter().zip(&atlas.intersection) {
        let cells: Vec<String> = row.iter().map(|v| format!("{:>2}", v)).collect();
        s.push_str(&format!("{}: {}\n", c.id, cells.join(" ")));
    }
    s.push_str("\n[generators]\n");
    for e in &atlas.generators.theta {
        s.push_str(&format!("theta {} @ {}: {}\n", e.component, e.chart, e.field.render()));
    }
    for e in &atlas.generators.eta {
        s.push_str(&format!(
            "eta {} @ {}-{}: {}\n",
            e.component,
            e.overlap.0,
            e.overlap.1,
            e.field.render()
        ));
    }
    s
}
