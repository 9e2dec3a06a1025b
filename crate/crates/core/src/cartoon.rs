//! SVG rendering of the per-rank character plane.
//!
//! Coordinates are `(u, v) = (ch1/rank, ch2/rank)` in the frame of the wall
//! search. Discriminant-zero classes sit on the parabola `v = u^2/2`, the
//! Clifford points `B_i` at `(i/2 - 1/4, (2i-1)^2/32)`, and the kernel of the
//! central charge at `(0, alpha^2/2)`. A rank-0 class has no finite per-rank
//! point; it is drawn as the pencil direction through each wall's kernel
//! point with slope `c2/c1`.
//!
//! Layout arithmetic uses floats; exact values ride along in `data-*`
//! attributes.

use num_traits::{ToPrimitive, Zero};

use crate::character::{b_char, Character};
use crate::rational::{fmt_rat, Rat};
use crate::walls::WallReport;

const W: f64 = 720.0;
const H: f64 = 540.0;
const U_SPAN: f64 = 2.0; // plane window: u in [-U_SPAN, U_SPAN]
const V_MIN: f64 = -0.55;
const V_MAX: f64 = 1.45;

fn px(u: f64) -> f64 {
    (u + U_SPAN) / (2.0 * U_SPAN) * W
}

fn py(v: f64) -> f64 {
    H - (v - V_MIN) / (V_MAX - V_MIN) * H
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn rf(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

/// Render the cartoon for a wall report. Always well-formed XML; element
/// classes: `parabola`, `b-point`, `target-point` or `target-direction`,
/// `wall-kernel`.
pub fn render(report: &WallReport) -> String {
    let mut s = String::new();
    s.push_str(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    s.push('\n');
    s.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    ));
    s.push('\n');
    s.push_str(&format!(
        "  <title>per-rank character plane at beta = {}</title>\n",
        esc(&fmt_rat(&report.beta))
    ));

    // axes
    s.push_str(&format!(
        r#"  <line class="axis" x1="0" y1="{0}" x2="{W}" y2="{0}" stroke="#888"/>"#,
        py(0.0)
    ));
    s.push('\n');
    s.push_str(&format!(
        r#"  <line class="axis" x1="{0}" y1="0" x2="{0}" y2="{H}" stroke="#888"/>"#,
        px(0.0)
    ));
    s.push('\n');

    // discriminant-zero parabola v = u^2/2 as a polyline
    let mut pts = Vec::new();
    let steps = 120;
    for k in 0..=steps {
        let u = -U_SPAN + 2.0 * U_SPAN * (k as f64) / (steps as f64);
        pts.push(format!("{:.2},{:.2}", px(u), py(u * u / 2.0)));
    }
    s.push_str(&format!(
        r#"  <polyline class="parabola" fill="none" stroke="#000" points="{}"/>"#,
        pts.join(" ")
    ));
    s.push('\n');

    // Clifford points
    for i in -3..=3 {
        let b = b_char(i).to_frame(&report.beta);
        let u = rf(&(&b.c1 / &b.rank));
        let v = rf(&(&b.c2 / &b.rank));
        s.push_str(&format!(
            r#"  <circle class="b-point" data-index="{i}" cx="{:.2}" cy="{:.2}" r="4" fill="#1f77b4"/>"#,
            px(u),
            py(v)
        ));
        s.push('\n');
        s.push_str(&format!(
            r#"  <text class="b-label" x="{:.2}" y="{:.2}" font-size="11">B({i})</text>"#,
            px(u) + 6.0,
            py(v) - 6.0
        ));
        s.push('\n');
    }

    // target
    let t = report.target.to_frame(&report.beta);
    if !t.rank.is_zero() {
        let u = rf(&(&t.c1 / &t.rank));
        let v = rf(&(&t.c2 / &t.rank));
        s.push_str(&format!(
            r#"  <circle class="target-point" data-char="{}" cx="{:.2}" cy="{:.2}" r="5" fill="#d62728"/>"#,
            esc(&t.to_string()),
            px(u),
            py(v)
        ));
        s.push('\n');
    } else {
        // rank-0 pencil direction through each wall kernel, slope c2/c1
        let slope = if t.c1.is_zero() {
            0.0
        } else {
            rf(&(&t.c2 / &t.c1))
        };
        for w in &report.walls {
            let v0 = rf(&w.alpha_sq) / 2.0;
            let (u1, u2) = (-U_SPAN, U_SPAN);
            s.push_str(&format!(
                r#"  <line class="target-direction" data-char="{}" data-alpha2="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#d62728" stroke-dasharray="4 3"/>"#,
                esc(&t.to_string()),
                esc(&fmt_rat(&w.alpha_sq)),
                px(u1),
                py(v0 + slope * u1),
                px(u2),
                py(v0 + slope * u2)
            ));
            s.push('\n');
        }
    }

    // kernel points and kernel lines through each decomposition member
    for w in &report.walls {
        let v0 = rf(&w.alpha_sq) / 2.0;
        s.push_str(&format!(
            r#"  <circle class="wall-kernel" data-alpha2="{}" cx="{:.2}" cy="{:.2}" r="3" fill="#2ca02c"/>"#,
            esc(&fmt_rat(&w.alpha_sq)),
            px(0.0),
            py(v0)
        ));
        s.push('\n');
        for d in &w.decompositions {
            for part in [&d.sub, &d.quotient] {
                if part.rank.is_zero() {
                    continue;
                }
                let u = rf(&(&part.c1 / &part.rank));
                let v = rf(&(&part.c2 / &part.rank));
                // line through the kernel point and the per-rank point
                let du = u;
                let dv = v - v0;
                if du.abs() < 1e-12 {
                    continue;
                }
                let m = dv / du;
                let (u1, u2) = (-U_SPAN, U_SPAN);
                s.push_str(&format!(
                    r#"  <line class="wall-kernel-line" data-alpha2="{}" data-char="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#2ca02c" stroke-width="0.8"/>"#,
                    esc(&fmt_rat(&w.alpha_sq)),
                    esc(&part.to_string()),
                    px(u1),
                    py(v0 + m * u1),
                    px(u2),
                    py(v0 + m * u2)
                ));
                s.push('\n');
            }
        }
    }

    s.push_str("</svg>\n");
    s
}

/// Minimal well-formedness check used by the structural tests: tags balance,
/// attributes are quoted, exactly one root element.
pub fn check_well_formed(xml: &str) -> Result<(), String> {
    let mut stack: Vec<String> = Vec::new();
    let mut roots = 0usize;
    let mut rest = xml;
    while let Some(open) = rest.find('<') {
        let tail = &rest[open + 1..];
        let close = tail.find('>').ok_or("unterminated tag")?;
        let tag = &tail[..close];
        rest = &tail[close + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let top = stack.pop().ok_or_else(|| format!("unmatched </{name}>"))?;
            if top != name.trim() {
                return Err(format!("expected </{top}>, found </{name}>"));
            }
            if stack.is_empty() {
                roots += 1;
            }
        } else if tag.ends_with('/') {
            if stack.is_empty() {
                roots += 1;
            }
        } else {
            let name = tag.split_whitespace().next().ok_or("empty tag")?;
            if tag.matches('"').count() % 2 != 0 {
                return Err(format!("odd quote count in <{name} ...>"));
            }
            stack.push(name.to_string());
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed <{}>", stack.last().unwrap()));
    }
    if roots != 1 {
        return Err(format!("expected one root element, found {roots}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::preset;
    use crate::lattice::CharLattice;
    use crate::rational::rat_int;
    use crate::walls::{enumerate_walls, SearchConfig};

    #[test]
    fn svg_is_well_formed_and_labeled() {
        let lat = CharLattice::default_paper();
        let report = enumerate_walls(
            &preset("E_C").unwrap(),
            &rat_int(-1),
            &lat,
            &SearchConfig::default(),
        )
        .unwrap();
        let svg = render(&report);
        check_well_formed(&svg).unwrap();
        for i in -3..=3 {
            assert!(svg.contains(&format!(r#"class="b-point" data-index="{i}""#)));
        }
        assert!(svg.contains(r#"class="parabola""#));
        assert!(svg.contains(r#"class="wall-kernel" data-alpha2="9/16""#));
        assert!(svg.contains(r#"class="wall-kernel" data-alpha2="1/16""#));
        assert!(svg.contains(r#"class="target-direction""#));
    }

    #[test]
    fn rank_nonzero_target_gets_a_point() {
        let lat = CharLattice::default_paper();
        let report = enumerate_walls(
            &preset("M_l").unwrap(),
            &rat_int(-1),
            &lat,
            &SearchConfig::default(),
        )
        .unwrap();
        let svg = render(&report);
        check_well_formed(&svg).unwrap();
        assert!(svg.contains(r#"class="target-point""#));
        assert!(svg.contains(r#"data-alpha2="5/16""#));
    }

    #[test]
    fn checker_rejects_malformed_xml() {
        assert!(check_well_formed("<a><b></a></b>").is_err());
        assert!(check_well_formed("<a>").is_err());
        assert!(check_well_formed("<a/><b/>").is_err());
        assert!(check_well_formed("<a x=\"1></a>").is_err());
    }
}
