//! Plot documents: the graph of a map or the cobweb of one exact orbit, as
//! CSV rows or a standalone SVG.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::orbit::VariantSelector;
use crate::rational::{to_decimal, Rational};

/// Decimal places used for every coordinate written to a plot document.
pub const PRECISION: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMode {
    Graph,
    Cobweb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Piece,
    Jump,
    Cobweb,
}

impl SegmentKind {
    fn prefix(self) -> &'static str {
        match self {
            SegmentKind::Piece => "piece",
            SegmentKind::Jump => "jump",
            SegmentKind::Cobweb => "cobweb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub x1: Rational,
    pub y1: Rational,
    pub x2: Rational,
    pub y2: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotDocument {
    pub a: Rational,
    pub b: Rational,
    pub segments: Vec<Segment>,
}

impl PlotDocument {
    pub fn count(&self, kind: SegmentKind) -> usize {
        self.segments.iter().filter(|s| s.kind == kind).count()
    }

    fn ids(&self) -> Vec<String> {
        let mut counters = [0usize; 3];
        self.segments
            .iter()
            .map(|s| {
                let k = s.kind as usize;
                counters[k] += 1;
                format!("{}-{}", s.kind.prefix(), counters[k] - 1)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# coordinates rounded to {PRECISION} decimal places\nsegment_id,x1,y1,x2,y2\n");
        for (id, s) in self.ids().into_iter().zip(&self.segments) {
            let d = |r: &Rational| to_decimal(r, PRECISION);
            writeln!(out, "{id},{},{},{},{}", d(&s.x1), d(&s.y1), d(&s.x2), d(&s.y2)).unwrap();
        }
        out
    }

    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 400.0;
        const MARGIN: f64 = 30.0;
        let width = &self.b - &self.a;
        let scale = |r: &Rational| -> f64 {
            let t = (r - &self.a) / &width;
            to_decimal(&t, PRECISION).parse::<f64>().expect("decimal text")
        };
        let px = |x: &Rational| MARGIN + scale(x) * SIZE;
        let py = |y: &Rational| MARGIN + (1.0 - scale(y)) * SIZE;
        let total = SIZE + 2.0 * MARGIN;
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
        )
        .unwrap();
        writeln!(out, "<!-- coordinates rounded to {PRECISION} decimal places; interval [{}, {}] -->", self.a, self.b).unwrap();
        writeln!(out, r#"<rect x="0" y="0" width="{total}" height="{total}" fill="white"/>"#).unwrap();
        let (lo, hi) = (MARGIN, MARGIN + SIZE);
        writeln!(out, r#"<g id="axes" stroke="black" stroke-width="1">"#).unwrap();
        writeln!(out, r#"<line x1="{lo}" y1="{hi}" x2="{hi}" y2="{hi}"/>"#).unwrap();
        writeln!(out, r#"<line x1="{lo}" y1="{hi}" x2="{lo}" y2="{lo}"/>"#).unwrap();
        writeln!(out, "</g>").unwrap();
        writeln!(out, r#"<text x="{lo}" y="{}" font-size="10">{}</text>"#, hi + 14.0, self.a).unwrap();
        writeln!(out, r#"<text x="{}" y="{}" font-size="10">{}</text>"#, hi - 10.0, hi + 14.0, self.b).unwrap();
        writeln!(
            out,
            r##"<line id="diagonal" x1="{lo}" y1="{hi}" x2="{hi}" y2="{lo}" stroke="#999" stroke-dasharray="4 3"/>"##
        )
        .unwrap();
        for (id, s) in self.ids().into_iter().zip(&self.segments) {
            let style = match s.kind {
                SegmentKind::Piece => r##"stroke="#1f4e9c" stroke-width="2""##,
                SegmentKind::Jump => r##"stroke="#c03030" stroke-dasharray="2 2""##,
                SegmentKind::Cobweb => r##"stroke="#2a7a2a" stroke-width="1""##,
            };
            writeln!(
                out,
                r#"<line id="{id}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {style}/>"#,
                px(&s.x1),
                py(&s.y1),
                px(&s.x2),
                py(&s.y2)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Pieces of `f`, with a dashed jump marker at each discontinuity.
pub fn graph(f: &PiecewiseMap) -> Result<PlotDocument> {
    let mut segments: Vec<Segment> = f
        .pieces()
        .iter()
        .map(|p| Segment {
            kind: SegmentKind::Piece,
            x1: p.left.clone(),
            y1: p.at(&p.left),
            x2: p.right.clone(),
            y2: p.at(&p.right),
        })
        .collect();
    for w in &f.special_points().d {
        segments.push(Segment {
            kind: SegmentKind::Jump,
            x1: w.clone(),
            y1: f.lateral_limit(w, Side::Minus)?,
            x2: w.clone(),
            y2: f.lateral_limit(w, Side::Plus)?,
        });
    }
    Ok(PlotDocument {
        a: f.a().clone(),
        b: f.b().clone(),
        segments,
    })
}

/// Staircase of the orbit of `x0` under the selected variant, `steps` iterates long.
pub fn cobweb(f: &PiecewiseMap, x0: &Rational, steps: usize, sel: &VariantSelector) -> Result<PlotDocument> {
    if !f.in_domain(x0) {
        return Err(Error::OutOfDomain(x0.clone()));
    }
    let mut segments = Vec::new();
    let mut x = x0.clone();
    for _ in 0..steps {
        let Some(y) = sel.apply(f, &x)? else { break };
        segments.push(Segment {
            kind: SegmentKind::Cobweb,
            x1: x.clone(),
            y1: x.clone(),
            x2: x.clone(),
            y2: y.clone(),
        });
        segments.push(Segment {
            kind: SegmentKind::Cobweb,
            x1: x.clone(),
            y1: y.clone(),
            x2: y.clone(),
            y2: y.clone(),
        });
        x = y;
    }
    if segments.is_empty() {
        return Err(Error::Invalid(format!("the orbit of {x0} is empty")));
    }
    let mut doc = graph(f)?;
    doc.segments.extend(segments);
    Ok(doc)
}

pub fn emit_plot(
    f: &PiecewiseMap,
    mode: PlotMode,
    x0: Option<&Rational>,
    steps: usize,
    sel: &VariantSelector,
) -> Result<PlotDocument> {
    match (mode, x0) {
        (PlotMode::Graph, _) => graph(f),
        (PlotMode::Cobweb, Some(x0)) => cobweb(f, x0, steps, sel),
        (PlotMode::Cobweb, None) => Err(Error::Invalid("cobweb needs --x0".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::tests::{shift, tent};
    use crate::rational::{int, rat};
    use crate::taxonomy::tests::hat;
    use num_traits::Signed;

    #[test]
    fn shift_graph_has_two_pieces_and_a_jump() {
        let doc = graph(&shift()).unwrap();
        assert_eq!(doc.count(SegmentKind::Piece), 2);
        assert_eq!(doc.count(SegmentKind::Jump), 1);
        let csv = doc.to_csv();
        assert!(csv.starts_with("# coordinates rounded to 12 decimal places\nsegment_id,x1,y1,x2,y2\n"));
        assert!(csv.contains("jump-0,0.500000000000,"));
    }

    #[test]
    fn identity_is_one_diagonal() {
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        let doc = graph(&id).unwrap();
        assert_eq!(doc.segments.len(), 1);
        let s = &doc.segments[0];
        assert_eq!((&s.x1, &s.y1, &s.x2, &s.y2), (&int(0), &int(0), &int(1), &int(1)));
    }

    #[test]
    fn hat_cobweb_spirals_in() {
        let f = hat();
        let doc = cobweb(&f, &rat(5, 8), 20, &VariantSelector::default()).unwrap();
        assert_eq!(doc.count(SegmentKind::Cobweb), 40);
        let target = rat(7, 12);
        let gaps: Vec<Rational> = doc
            .segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Cobweb && s.x1 == s.x2)
            .map(|s| (&s.x1 - &target).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        let xs: Vec<bool> = doc
            .segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Cobweb && s.x1 == s.x2)
            .map(|s| s.x1 > target)
            .collect();
        assert!(xs.windows(2).all(|w| w[0] != w[1]));
        let svg = doc.to_svg();
        assert!(svg.contains(r#"id="diagonal""#) && svg.contains("cobweb-39"));
    }

    #[test]
    fn empty_orbits_are_errors() {
        let f = shift();
        assert!(cobweb(&f, &rat(1, 2), 5, &VariantSelector::default()).is_err());
        assert!(cobweb(&tent(), &rat(1, 3), 0, &VariantSelector::default()).is_err());
        assert!(emit_plot(&f, PlotMode::Cobweb, None, 5, &VariantSelector::default()).is_err());
    }
}
