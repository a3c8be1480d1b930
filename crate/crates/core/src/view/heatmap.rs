//! SVG heatmap of normalized centroids.
//!
//! Rows are activities, columns are cluster ids. Cell fill ramps linearly
//! from white (value 0) to full red (value 1): the red channel stays at 255
//! while green and blue fall off with the value. Output bytes are a pure
//! function of the input matrix.

use super::NormalizedCentroids;
use crate::error::{Error, Result};

const CELL: usize = 28;
const TOP_MARGIN: usize = 40;
const RIGHT_MARGIN: usize = 12;
const BOTTOM_MARGIN: usize = 12;
const FONT_SIZE: usize = 12;
// monospace glyph advance approximation used to size the label gutter
const CHAR_WIDTH: usize = 8;

/// Renders the matrix as an SVG document string.
pub fn render_heatmap(nc: &NormalizedCentroids) -> Result<String> {
    if nc.n_clusters == 0 {
        return Err(Error::Clustering("cannot render a heatmap with no clusters".into()));
    }
    if nc.rows.is_empty() {
        return Err(Error::Parameter(
            "cannot render a heatmap with no retained activities (lower --row-filter)".into(),
        ));
    }

    let label_width = nc
        .activities
        .iter()
        .map(|a| a.chars().count())
        .max()
        .unwrap_or(0)
        * CHAR_WIDTH
        + 16;
    let width = label_width + nc.n_clusters * CELL + RIGHT_MARGIN;
    let height = TOP_MARGIN + nc.rows.len() * CELL + BOTTOM_MARGIN;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // column headers: cluster ids
    for c in 0..nc.n_clusters {
        let x = label_width + c * CELL + CELL / 2;
        let y = TOP_MARGIN - 10;
        svg.push_str(&format!(
            "  <text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"{FONT_SIZE}\" \
             text-anchor=\"middle\">{c}</text>\n"
        ));
    }

    for (r, (activity, row)) in nc.activities.iter().zip(&nc.rows).enumerate() {
        let row_y = TOP_MARGIN + r * CELL;
        let text_y = row_y + CELL / 2 + FONT_SIZE / 2 - 2;
        svg.push_str(&format!(
            "  <text x=\"{x}\" y=\"{text_y}\" font-family=\"monospace\" font-size=\"{FONT_SIZE}\" \
             text-anchor=\"end\">{label}</text>\n",
            x = label_width - 8,
            label = escape_xml(activity),
        ));
        for (c, &value) in row.iter().enumerate() {
            let x = label_width + c * CELL;
            let fill = ramp(value);
            svg.push_str(&format!(
                "  <rect x=\"{x}\" y=\"{row_y}\" width=\"{CELL}\" height=\"{CELL}\" \
                 fill=\"{fill}\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n"
            ));
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// White-to-red ramp: red channel full, green/blue linear in (1 - value).
fn ramp(value: f64) -> String {
    let clamped = value.clamp(0.0, 1.0);
    let fade = (255.0 * (1.0 - clamped)).round() as u8;
    format!("rgb(255,{fade},{fade})")
}

fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::normalize_centroids;
    use super::super::tests::{worked_alphabet, worked_model};
    use super::*;

    fn single_cell(value: f64) -> NormalizedCentroids {
        NormalizedCentroids {
            activities: vec!["only".into()],
            rows: vec![vec![value]],
            n_clusters: 1,
        }
    }

    #[test]
    fn full_value_renders_full_red() {
        let svg = render_heatmap(&single_cell(1.0)).unwrap();
        assert!(svg.contains("fill=\"rgb(255,0,0)\""), "svg: {svg}");
    }

    #[test]
    fn zero_value_renders_white() {
        let svg = render_heatmap(&single_cell(0.0)).unwrap();
        assert!(svg.contains("fill=\"rgb(255,255,255)\""), "svg: {svg}");
    }

    // Extract cell fills in document order and locate the darkest one.
    fn cell_fades(svg: &str) -> Vec<u8> {
        svg.lines()
            .filter(|l| l.contains("<rect") && l.contains("rgb(255,"))
            .map(|l| {
                let start = l.find("rgb(255,").unwrap() + "rgb(255,".len();
                let rest = &l[start..];
                let end = rest.find(',').unwrap();
                rest[..end].parse::<u8>().unwrap()
            })
            .collect()
    }

    #[test]
    fn worked_matrix_darkest_cell_is_cluster1_activity0() {
        let nc = normalize_centroids(&worked_model(), &worked_alphabet()).unwrap();
        let svg = render_heatmap(&nc).unwrap();
        let fades = cell_fades(&svg);
        assert_eq!(fades.len(), 6 * 5);
        let darkest = fades
            .iter()
            .enumerate()
            .min_by_key(|(_, &f)| f)
            .map(|(i, _)| i)
            .unwrap();
        // row-major layout: row 0 (activity p0), column 1 (cluster 1)
        assert_eq!(darkest, 1);
        let expected = (255.0 * (1.0 - 40.0 / 42.0_f64)).round() as u8;
        assert_eq!(fades[darkest], expected);
    }

    #[test]
    fn output_is_deterministic() {
        let nc = normalize_centroids(&worked_model(), &worked_alphabet()).unwrap();
        assert_eq!(render_heatmap(&nc).unwrap(), render_heatmap(&nc).unwrap());
    }

    #[test]
    fn labels_are_escaped() {
        let nc = NormalizedCentroids {
            activities: vec!["a<b & c".into()],
            rows: vec![vec![0.5]],
            n_clusters: 1,
        };
        let svg = render_heatmap(&nc).unwrap();
        assert!(svg.contains("a&lt;b &amp; c"));
    }

    #[test]
    fn empty_matrix_is_an_error() {
        let nc = NormalizedCentroids {
            activities: vec![],
            rows: vec![],
            n_clusters: 2,
        };
        assert!(render_heatmap(&nc).is_err());
    }
}
