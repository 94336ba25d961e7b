use std::collections::BTreeSet;

use gdl_core::render::{render_svg, RenderOptions};
use gdl_core::{build_dl, build_dln, build_du, random_diagram, GaussDiagram};
use proptest::prelude::*;

fn count(doc: &roxmltree::Document, tag: &str, class: &str) -> usize {
    doc.descendants().filter(|n| n.has_tag_name(tag) && n.attribute("class") == Some(class)).count()
}

fn check(d: &GaussDiagram, opts: &RenderOptions) -> Result<(), String> {
    let svg = render_svg(d, opts);
    let doc = roxmltree::Document::parse(&svg).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    let (w, h) = opts.size();
    let ok = root.has_tag_name("svg")
        && root.attribute("width") == Some(w.to_string().as_str())
        && root.attribute("height") == Some(h.to_string().as_str())
        && count(&doc, "circle", "component") == d.num_components()
        && count(&doc, "path", "arrow") == d.num_arrows()
        && count(&doc, "text", "sign") == d.num_arrows()
        && count(&doc, "circle", "endpoint") == 2 * d.num_arrows()
        && count(&doc, "text", "label") == if opts.show_labels { 2 * d.num_arrows() } else { 0 };
    if !ok {
        return Err(format!("unexpected element counts for {d}"));
    }
    let coords_finite = doc
        .descendants()
        .filter_map(|n| n.attribute("cx"))
        .all(|v| v.parse::<f64>().is_ok_and(f64::is_finite));
    if !coords_finite {
        return Err(format!("non-finite coordinate for {d}"));
    }
    Ok(())
}

#[test]
fn examples_render_to_well_formed_svg() {
    for d in [build_du(), build_dl(), build_dln(4)] {
        check(&d, &RenderOptions::default()).unwrap();
    }
    let mut opts = RenderOptions::new(200, 100).unwrap();
    opts.show_labels = false;
    check(&build_dl(), &opts).unwrap();
}

#[test]
fn signs_and_highlights_show_up() {
    let mut opts = RenderOptions::default();
    opts.highlight = BTreeSet::from([5, 6]);
    let svg = render_svg(&build_dl(), &opts);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let signs: Vec<&str> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("sign"))
        .filter_map(|n| n.text())
        .collect();
    assert_eq!(signs.iter().filter(|s| **s == "+").count(), 3);
    assert_eq!(signs.iter().filter(|s| **s == "-").count(), 3);
    let red: BTreeSet<&str> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("arrow") && n.attribute("stroke") == Some("crimson"))
        .filter_map(|n| n.attribute("data-label"))
        .collect();
    assert_eq!(red, BTreeSet::from(["5", "6"]));
}

#[test]
fn zero_size_is_rejected() {
    assert!(RenderOptions::new(0, 10).is_err());
    assert!(RenderOptions::new(10, 0).is_err());
}

proptest! {
    #[test]
    fn random_diagrams_render(k in 1usize..=3, n in 0usize..=10, seed in any::<u64>(), w in 1u32..2000, h in 1u32..2000) {
        let d = random_diagram(k, n, seed);
        let opts = RenderOptions::new(w, h).unwrap();
        prop_assert!(check(&d, &opts).is_ok(), "{}", check(&d, &opts).unwrap_err());
    }
}
