//! Biplots: each Ferrers factor becomes an axis of attribute groups, and
//! every object sits at the last position whose whole attribute prefix it
//! has.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::context::{FormalContext, IncidencePair};
use crate::twofactor::{FactorizationResult, FerrersFactor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BiplotError {
    #[error("factor is not a Ferrers relation")]
    NotFerrers,
    #[error("factor pair ({0}, {1}) is out of range")]
    OutOfRange(usize, usize),
    #[error("unsupported format {0:?} (expected svg, tikz or csv)")]
    UnsupportedFormat(String),
}

/// One biplot axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorAxis {
    /// Attribute indices per position, first position first. Attributes in a
    /// group have the same supporting objects within the factor.
    pub groups: Vec<Vec<usize>>,
    /// Comma-joined attribute names per group.
    pub labels: Vec<String>,
    /// Position of every object, `0` meaning before the first group.
    pub object_position: Vec<usize>,
}

impl FactorAxis {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// 1-based position of the group holding `attribute`.
    pub fn position_of(&self, attribute: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&attribute)).map(|i| i + 1)
    }

    /// Attributes of the first `p` groups.
    pub fn prefix(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        self.groups[..p].iter().flatten().copied()
    }
}

pub fn factor_axis(ctx: &FormalContext, factor: &FerrersFactor) -> Result<FactorAxis, BiplotError> {
    if !factor.is_ferrers() {
        return Err(BiplotError::NotFerrers);
    }
    let mut support = vec![FixedBitSet::with_capacity(ctx.n_objects()); ctx.n_attributes()];
    for p in factor.pairs() {
        if p.object >= ctx.n_objects() || p.attribute >= ctx.n_attributes() {
            return Err(BiplotError::OutOfRange(p.object, p.attribute));
        }
        support[p.attribute].insert(p.object);
    }

    // identical supports share a position; supports form a chain
    let mut by_support: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (m, s) in support.iter().enumerate() {
        if !s.is_clear() {
            by_support.entry(s.ones().collect()).or_default().push(m);
        }
    }
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = by_support.into_iter().collect();
    groups.sort_by_key(|(s, attrs)| (std::cmp::Reverse(s.len()), attrs[0]));

    let mut object_position = vec![0; ctx.n_objects()];
    for (i, (objs, _)) in groups.iter().enumerate() {
        for &g in objs {
            object_position[g] = object_position[g].max(i + 1);
        }
    }
    let labels = groups
        .iter()
        .map(|(_, attrs)| attrs.iter().map(|&m| ctx.attributes()[m].as_str()).collect::<Vec<_>>().join(","))
        .collect();
    Ok(FactorAxis { groups: groups.into_iter().map(|(_, a)| a).collect(), labels, object_position })
}

/// Pairs read back from two axes: every object gets the attribute prefix up
/// to its position on each axis.
pub fn reconstruct(first: &FactorAxis, second: &FactorAxis) -> BTreeSet<IncidencePair> {
    let mut out = BTreeSet::new();
    for axis in [first, second] {
        for (g, &p) in axis.object_position.iter().enumerate() {
            out.extend(axis.prefix(p).map(|m| IncidencePair::new(g, m)));
        }
    }
    out
}

/// A two-axis plot: the first factor runs vertically, the second
/// horizontally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biplot {
    pub objects: Vec<String>,
    pub horizontal: FactorAxis,
    pub vertical: FactorAxis,
}

impl Biplot {
    pub fn new(ctx: &FormalContext, result: &FactorizationResult) -> Result<Self, BiplotError> {
        Ok(Self {
            objects: ctx.objects().to_vec(),
            horizontal: factor_axis(ctx, &result.f2)?,
            vertical: factor_axis(ctx, &result.f1)?,
        })
    }

    /// `(x, y)` of an object.
    pub fn coordinates(&self, object: usize) -> (usize, usize) {
        (self.horizontal.object_position[object], self.vertical.object_position[object])
    }

    pub fn reconstruct(&self) -> BTreeSet<IncidencePair> {
        reconstruct(&self.horizontal, &self.vertical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Svg,
    Tikz,
    Csv,
}

impl FromStr for Format {
    type Err = BiplotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(Format::Svg),
            "tikz" | "tex" => Ok(Format::Tikz),
            "csv" => Ok(Format::Csv),
            _ => Err(BiplotError::UnsupportedFormat(s.to_string())),
        }
    }
}

pub fn render(plot: &Biplot, format: Format) -> String {
    match format {
        Format::Csv => render_csv(plot),
        Format::Svg => render_svg(plot),
        Format::Tikz => render_tikz(plot),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `object,x,y` rows with exact integer coordinates, then one `#axis1:`
/// (horizontal) and one `#axis2:` (vertical) line listing group labels.
fn render_csv(plot: &Biplot) -> String {
    let mut out = String::from("object,x,y\n");
    for (g, name) in plot.objects.iter().enumerate() {
        let (x, y) = plot.coordinates(g);
        let _ = writeln!(out, "{},{x},{y}", csv_field(name));
    }
    let _ = writeln!(out, "#axis1: {}", plot.horizontal.labels.join(";"));
    let _ = writeln!(out, "#axis2: {}", plot.vertical.labels.join(";"));
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Offsets for objects that share a grid point, spread on a small circle.
fn jitter(plot: &Biplot) -> Vec<(f64, f64)> {
    let mut at: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for g in 0..plot.objects.len() {
        at.entry(plot.coordinates(g)).or_default().push(g);
    }
    let mut out = vec![(0.0, 0.0); plot.objects.len()];
    for members in at.values().filter(|m| m.len() > 1) {
        let k = members.len() as f64;
        for (i, &g) in members.iter().enumerate() {
            let angle = std::f64::consts::TAU * i as f64 / k;
            out[g] = (angle.cos(), angle.sin());
        }
    }
    out
}

const STEP: f64 = 70.0;
const MARGIN: f64 = 120.0;

fn render_svg(plot: &Biplot) -> String {
    let nx = plot.horizontal.len() as f64;
    let ny = plot.vertical.len() as f64;
    let width = 2.0 * MARGIN + STEP * nx.max(1.0);
    let height = 2.0 * MARGIN + STEP * ny.max(1.0);
    let x_of = |p: f64| MARGIN + STEP * p;
    let y_of = |p: f64| height - MARGIN - STEP * p;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"  <line class="axis" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        x_of(0.0),
        y_of(0.0),
        x_of(nx.max(1.0)),
        y_of(0.0)
    );
    let _ = writeln!(
        s,
        r#"  <line class="axis" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        x_of(0.0),
        y_of(0.0),
        x_of(0.0),
        y_of(ny.max(1.0))
    );
    for (i, label) in plot.horizontal.labels.iter().enumerate() {
        let x = x_of(i as f64 + 1.0);
        let y = y_of(0.0);
        let _ = writeln!(
            s,
            r#"  <line class="tick" x1="{x:.1}" y1="{y:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            y + 5.0
        );
        let _ = writeln!(
            s,
            r#"  <text class="tick-label" x="{x:.1}" y="{:.1}" text-anchor="end" transform="rotate(-45 {x:.1} {:.1})">{}</text>"#,
            y + 18.0,
            y + 18.0,
            xml_escape(label)
        );
    }
    for (i, label) in plot.vertical.labels.iter().enumerate() {
        let x = x_of(0.0);
        let y = y_of(i as f64 + 1.0);
        let _ = writeln!(
            s,
            r#"  <line class="tick" x1="{:.1}" y1="{y:.1}" x2="{x:.1}" y2="{y:.1}" stroke="black"/>"#,
            x - 5.0
        );
        let _ = writeln!(
            s,
            r#"  <text class="tick-label" x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x - 8.0,
            y + 4.0,
            xml_escape(label)
        );
    }
    let offsets = jitter(plot);
    for (g, name) in plot.objects.iter().enumerate() {
        let (px, py) = plot.coordinates(g);
        let cx = x_of(px as f64) + 8.0 * offsets[g].0;
        let cy = y_of(py as f64) - 8.0 * offsets[g].1;
        let _ = writeln!(
            s,
            r#"  <circle class="object" cx="{cx:.1}" cy="{cy:.1}" r="3.5" fill="steelblue"><title>{}</title></circle>"#,
            xml_escape(name)
        );
        let _ = writeln!(
            s,
            r#"  <text class="object-label" x="{:.1}" y="{:.1}">{}</text>"#,
            cx + 5.0,
            cy - 5.0,
            xml_escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str(r"\textbackslash{}"),
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str(r"\textasciitilde{}"),
            '^' => out.push_str(r"\textasciicircum{}"),
            _ => out.push(c),
        }
    }
    out
}

fn render_tikz(plot: &Biplot) -> String {
    let nx = plot.horizontal.len().max(1);
    let ny = plot.vertical.len().max(1);
    let mut s = String::new();
    s.push_str("\\documentclass[tikz]{standalone}\n\\begin{document}\n\\begin{tikzpicture}[x=1.2cm,y=1.2cm]\n");
    let _ = writeln!(s, "  \\draw (0,0) -- ({nx},0);");
    let _ = writeln!(s, "  \\draw (0,0) -- (0,{ny});");
    for (i, label) in plot.horizontal.labels.iter().enumerate() {
        let _ = writeln!(
            s,
            "  \\draw ({x},0) -- ({x},-0.1) node[below, rotate=45, anchor=north east, font=\\scriptsize] {{{}}};",
            tex_escape(label),
            x = i + 1
        );
    }
    for (i, label) in plot.vertical.labels.iter().enumerate() {
        let _ = writeln!(
            s,
            "  \\draw (0,{y}) -- (-0.1,{y}) node[left, font=\\scriptsize] {{{}}};",
            tex_escape(label),
            y = i + 1
        );
    }
    let offsets = jitter(plot);
    for (g, name) in plot.objects.iter().enumerate() {
        let (px, py) = plot.coordinates(g);
        let x = px as f64 + 0.12 * offsets[g].0;
        let y = py as f64 + 0.12 * offsets[g].1;
        let _ = writeln!(
            s,
            "  \\fill ({x:.3},{y:.3}) circle (1.5pt) node[above right, font=\\tiny] {{{}}};",
            tex_escape(name)
        );
    }
    s.push_str("\\end{tikzpicture}\n\\end{document}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_axis() {
        let ctx = FormalContext::from_pairs(2, 3, []).unwrap();
        let f: FerrersFactor =
            [IncidencePair::new(0, 1), IncidencePair::new(0, 2), IncidencePair::new(1, 2)].into_iter().collect();
        let axis = factor_axis(&ctx, &f).unwrap();
        assert_eq!(axis.groups, vec![vec![2], vec![1]]);
        assert_eq!(axis.object_position, vec![2, 1]);
        assert_eq!(axis.labels, vec!["m3", "m2"]);
    }

    #[test]
    fn identical_supports_share_a_position() {
        let ctx = FormalContext::from_pairs(2, 3, []).unwrap();
        let f: FerrersFactor =
            [IncidencePair::new(0, 0), IncidencePair::new(0, 2), IncidencePair::new(1, 1)].into_iter().collect();
        assert_eq!(factor_axis(&ctx, &f), Err(BiplotError::NotFerrers));
        let f: FerrersFactor =
            [IncidencePair::new(0, 0), IncidencePair::new(0, 2), IncidencePair::new(1, 1), IncidencePair::new(0, 1)]
                .into_iter()
                .collect();
        let axis = factor_axis(&ctx, &f).unwrap();
        assert_eq!(axis.groups, vec![vec![1], vec![0, 2]]);
        assert_eq!(axis.labels, vec!["m2", "m1,m3"]);
        assert_eq!(axis.object_position, vec![2, 1]);
    }

    #[test]
    fn objects_outside_the_factor_sit_at_zero() {
        let ctx = FormalContext::from_pairs(3, 2, []).unwrap();
        let f: FerrersFactor = [IncidencePair::new(1, 0)].into_iter().collect();
        let axis = factor_axis(&ctx, &f).unwrap();
        assert_eq!(axis.object_position, vec![0, 1, 0]);
    }

    #[test]
    fn empty_plot_renders() {
        let ctx = FormalContext::from_pairs(0, 0, []).unwrap();
        let plot = Biplot::new(&ctx, &FactorizationResult::default()).unwrap();
        assert!(plot.reconstruct().is_empty());
        let svg = render(&plot, Format::Svg);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("class=\"axis\"").count(), 2);
        assert!(!svg.contains("<circle"));
        assert_eq!(render(&plot, Format::Csv), "object,x,y\n#axis1: \n#axis2: \n");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("SVG".parse::<Format>(), Ok(Format::Svg));
        assert_eq!("png".parse::<Format>(), Err(BiplotError::UnsupportedFormat("png".into())));
    }

    #[test]
    fn escaping() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(xml_escape("<&>"), "&lt;&amp;&gt;");
        assert_eq!(tex_escape("a_b&c"), "a\\_b\\&c");
    }
}
