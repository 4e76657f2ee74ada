//! The `report` command: every analysis on one input, as one JSON document.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use gcg::develop::{self, DevelopError, DevelopedBall};
use gcg::gcog::{self, ComplexData, GraphicalComplexOfGroups};
use gcg::poset;
use gcg::smallcancel::{self, AngleAssignment};
use gcg::{flats, wise};

use crate::{parse_json, read_input, to_value, Failure, Outcome};

/// Cell budget for the report's ball when `GCG_MAX_CELLS` is not set.
const REPORT_CELLS: usize = 250_000;

const PRESETS: [(&str, AngleAssignment); 5] = [
    ("c6", AngleAssignment::C6),
    ("c6hyp", AngleAssignment::C6_HYP),
    ("notriple-hyp", AngleAssignment::NO_TRIPLE_HYP),
    ("c4t4", AngleAssignment::C4T4),
    ("c5t4", AngleAssignment::C5T4),
];

#[derive(Debug, Serialize)]
struct RunReport {
    input_digest: String,
    commands: Vec<String>,
    parameters: BTreeMap<&'static str, Value>,
    certificates: BTreeMap<&'static str, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<BTreeMap<&'static str, u128>>,
}

struct Recorder {
    report: RunReport,
    timing: bool,
    clock: Instant,
}

impl Recorder {
    fn record(&mut self, name: &'static str, value: Value) {
        self.report.commands.push(name.to_string());
        self.report.certificates.insert(name, value);
        if self.timing {
            let ms = self.clock.elapsed().as_millis();
            self.report.timing_ms.get_or_insert_with(BTreeMap::new).insert(name, ms);
            self.clock = Instant::now();
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// The largest ball of radius at most `radius` under the cell budget.
fn fitting_ball(gc: &GraphicalComplexOfGroups, radius: u32) -> Result<DevelopedBall, DevelopError> {
    let cap = if std::env::var(develop::MAX_CELLS_ENV).is_ok() { develop::max_cells() } else { REPORT_CELLS };
    let mut r = radius;
    loop {
        match develop::develop_ball_capped(gc, r, cap) {
            Err(DevelopError::CellLimit { .. }) if r > 0 => r -= 1,
            other => return other,
        }
    }
}

pub(crate) fn run(input: &Path, radius: u32, c4t4: bool, timing: bool) -> Outcome {
    let text = read_input(input)?;
    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    let data: ComplexData = parse_json(input, &text)?;
    let gc = GraphicalComplexOfGroups::from_data(data).map_err(|e| Failure::input(e.to_string()))?;
    let mut rec = Recorder {
        report: RunReport {
            input_digest: digest,
            commands: Vec::new(),
            parameters: BTreeMap::from([("radius", json!(radius)), ("c4t4", json!(c4t4))]),
            certificates: BTreeMap::new(),
            timing_ms: None,
        },
        timing,
        clock: Instant::now(),
    };

    let convention = poset::check_convention(gc.poset());
    let complex = gcog::validate(&gc);
    let valid = convention.passes() && complex.is_valid();
    rec.record("validate", json!({ "verdict": verdict(valid), "convention": convention, "complex": complex }));

    let hugeness = poset::hugeness(gc.poset());
    rec.record("hugeness", json!({ "hugeness": hugeness, "six_huge": hugeness.is_none_or(|k| k >= 6) }));

    let links: BTreeMap<&str, Value> = PRESETS
        .iter()
        .map(|&(name, angles)| {
            let cert = smallcancel::check_link_condition_complex(&gc, angles);
            (name, json!({ "verdict": verdict(cert.holds), "summary": cert.summary, "failures": cert.failures }))
        })
        .collect();
    rec.record("links", to_value(&links));

    let t4 = gcog::check_t4(&gc);
    rec.record("triples", json!({ "t4": t4.holds, "witness": t4.witness }));

    let classification = gcog::classify(&gc);
    let out_of_theory = classification.is_out_of_theory();
    rec.record("classify", to_value(&classification));
    rec.record("cat_minus_one", to_value(&smallcancel::cat_minus_one_certificate(&gc)));

    let ball = match fitting_ball(&gc, radius) {
        Ok(ball) => ball,
        Err(e) => {
            rec.record("develop", json!({ "verdict": "unknown", "error": e }));
            let code = if out_of_theory { 3 } else { 0 };
            return Ok((to_value(&rec.report), code));
        }
    };
    let scope = if ball.radius() == radius { "full" } else { "partial" };
    let link_report = develop::check_links(&ball);
    let geodesic = develop::check_geodesic_completeness(&ball);
    let coloring = develop::check_type_coloring(&ball);
    rec.record(
        "develop",
        json!({
            "verdict": verdict(link_report.passes() && geodesic.passes() && coloring.passes()),
            "scope": scope,
            "requested_radius": radius,
            "radius": ball.radius(),
            "cells": ball.cell_count(),
            "instances": ball.instance_count(),
            "links": link_report,
            "geodesic_completeness": geodesic,
            "type_coloring": coloring,
        }),
    );

    let pieces = smallcancel::enumerate_pieces(&ball);
    rec.record(
        "pieces",
        json!({ "verdict": verdict(pieces.too_long.is_empty()), "count": pieces.pieces.len(), "max_len": pieces.max_len, "too_long": pieces.too_long }),
    );
    let k = if c4t4 { 4 } else { 6 };
    let ck = smallcancel::check_ck(&ball, k, false);
    rec.record("ck", json!({ "verdict": verdict(ck.holds && ck.cprime_holds), "certificate": ck }));

    let nerve = wise::build_nerve(&ball);
    let dim = wise::nerve_dimension(&ball);
    rec.record("nerve_dimension", json!({ "verdict": verdict(dim.agrees), "report": dim }));
    let mut largeness = BTreeMap::new();
    for k in [6, 7] {
        if hugeness.is_none_or(|h| h >= k) {
            let cert = wise::check_k_largeness(&nerve, k);
            largeness.insert(k.to_string(), json!({ "verdict": verdict(cert.holds), "certificate": cert }));
        }
    }
    rec.record("largeness", to_value(&largeness));
    rec.record("cut_up_tetrahedron", to_value(&wise::find_cut_up_tetrahedron(&nerve)));

    let q = gc.poset();
    if (0..q.small_count()).all(|s| q.neighbors_of(s).len() == 2) {
        if let Ok(r) = wise::retriangulate_valence2(&ball) {
            let check = wise::check_retriangulation(&ball, &r);
            let mut value = json!({
                "verdict": verdict(check.passes()),
                "vertices": r.vertices.len(),
                "edges": r.graph.edge_count(),
                "report": check,
            });
            if c4t4 {
                value["square_grid"] = json!(wise::is_square_grid(&r, ball.radius() as usize));
            }
            rec.record("retriangulation", value);
        }
    }

    if flats::recognise_torus(&gc).is_some() {
        let flat = flats::find_flat(&gc);
        rec.record("flat", json!({ "verdict": verdict(flat.is_some()), "witness": flat }));
    }

    let code = if out_of_theory { 3 } else { 0 };
    Ok((to_value(&rec.report), code))
}
