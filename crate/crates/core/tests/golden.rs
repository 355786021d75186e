//! Emitted documents for a small region, pinned byte for byte. Regenerate with
//! `gtree generate --max-value 32 --format wrl|interchange -o ...` after a
//! deliberate change to the layout or the writers.

use gtree_core::region::{render_region, RegionFormat, RegionLimits, RegionRequest};

fn render(format: RegionFormat) -> String {
    let req = RegionRequest {
        format,
        ..RegionRequest::new(32)
    };
    render_region(&req, &RegionLimits::NONE).unwrap().body
}

#[test]
fn vrml_region_32() {
    assert_eq!(
        render(RegionFormat::Wrl),
        include_str!("golden/region-32.wrl")
    );
}

#[test]
fn interchange_region_32() {
    assert_eq!(
        render(RegionFormat::Interchange),
        include_str!("golden/region-32.json")
    );
}
