use ddtea::svg::{Plot, Series};

fn plot(series: usize) -> Plot {
    Plot {
        title: "a < b & c".into(),
        x_label: "x".into(),
        y_label: "y".into(),
        series: (0..series)
            .map(|k| Series {
                name: format!("s{k}"),
                points: (0..20).map(|i| (i as f64, (i * (k + 1)) as f64)).collect(),
                band: if k == 0 {
                    (0..20)
                        .map(|i| (i as f64, i as f64 - 1.0, i as f64 + 1.0))
                        .collect()
                } else {
                    Vec::new()
                },
            })
            .collect(),
    }
}

#[test]
fn svg_is_well_formed_with_one_polyline_per_series() {
    for n in 1..4 {
        let text = plot(n).render();
        let doc = roxmltree::Document::parse(&text).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("viewBox"), Some("0 0 800 600"));
        let polylines = doc
            .descendants()
            .filter(|d| d.has_tag_name("polyline"))
            .count();
        assert_eq!(polylines, n);
        assert_eq!(
            doc.descendants()
                .filter(|d| d.has_tag_name("polygon"))
                .count(),
            1
        );
        assert!(!text.contains("href"));
        // six labelled ticks per axis
        let labels = doc.descendants().filter(|d| d.has_tag_name("text")).count();
        assert_eq!(labels, 1 + 12 + 2 + n);
    }
}

#[test]
fn degenerate_ranges_and_gaps_render() {
    let p = Plot {
        series: vec![Series {
            name: "flat".into(),
            points: vec![(1.0, 0.5), (2.0, f64::NAN), (3.0, 0.5)],
            band: Vec::new(),
        }],
        ..Default::default()
    };
    let text = p.render();
    roxmltree::Document::parse(&text).unwrap();
    assert!(!text.contains("NaN"));
    roxmltree::Document::parse(&Plot::default().render()).unwrap();
}
