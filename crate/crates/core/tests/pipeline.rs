use std::f64::consts::FRAC_PI_2;

use quadscribe_core::inscribe::{find_inscriptions, validate_inscription, PairMap};
use quadscribe_core::io::{parse_curve_spec, render_svg, InscriptionRecord, Provenance, ResultRecord};
use quadscribe_core::{AngleTriple, Surface};

const SPEC: &str = r#"
version = 1
surface = "hyperbolic"
chart = "upper-half-plane"
family = "fourier-radial"
center = [0.3, 1.5]
radius = 0.6
cos = [0.0, 0.04]
sin = [0.0, 0.0, 0.03]
samples = 768
"#;

#[test]
fn spec_to_record_to_figure() {
    let spec = parse_curve_spec(SPEC).unwrap();
    let sc = spec.sample().unwrap();
    assert_eq!(sc.surface(), Surface::Hyperbolic);
    let triple = AngleTriple::new(FRAC_PI_2, 2.0, 2.5).unwrap();
    let outcome = find_inscriptions(&sc, &PairMap::Cyclic(triple), 192).unwrap();
    assert!(!outcome.inscriptions.is_empty());

    let mut record = ResultRecord::new(sc.surface(), spec.chart, Provenance::current(vec!["test".into()]));
    for ins in &outcome.inscriptions {
        assert!(validate_inscription(ins, &sc).passed());
        let r = InscriptionRecord::new(ins, &sc, spec.chart);
        assert!(r.vertices.iter().all(|v| v.len() == 2 && v[1] > 0.0));
        record.inscriptions.push(r);
    }
    record.diagnostics.search = Some(outcome.stats);

    let back = ResultRecord::from_json(&record.to_json()).unwrap();
    assert_eq!(back, record);
    let circle = back.inscriptions[0].circle(Surface::Hyperbolic);
    let first = sc.point_at(back.inscriptions[0].params[0]);
    assert!((Surface::Hyperbolic.dist(circle.center().coords(), first.coords()) - circle.radius()).abs() < 1e-8);

    let svg = render_svg(&sc, spec.chart, Some(&back));
    assert_eq!(svg.matches(r#"class="vertex""#).count(), 4 * back.inscriptions.len());
    assert_eq!(render_svg(&sc, spec.chart, Some(&back)), svg);
}

#[test]
fn every_surface_has_a_square() {
    let specs = [
        "version = 1\nsurface = \"hyperbolic\"\nchart = \"poincare-disk\"\nfamily = \"fourier-radial\"\nradius = 0.4\ncos = [0.0, 0.0, 0.03]\n",
        "version = 1\nsurface = \"euclidean\"\nchart = \"plane\"\nfamily = \"fourier-radial\"\nradius = 2.0\ncos = [0.0, 0.1]\nsin = [0.0, 0.0, 0.05]\nsamples = 512\n",
        "version = 1\nsurface = \"sphere\"\nchart = \"stereographic\"\nfamily = \"fourier-radial\"\nradius = 0.5\ncos = [0.0, 0.03]\n",
    ];
    for text in specs {
        let sc = parse_curve_spec(text).unwrap().sample().unwrap();
        let map = if sc.surface() == Surface::Spherical {
            PairMap::rectangle_flow(FRAC_PI_2).unwrap()
        } else {
            PairMap::Cyclic(AngleTriple::rectangle(FRAC_PI_2).unwrap())
        };
        let found = find_inscriptions(&sc, &map, 128).unwrap().inscriptions;
        assert!(!found.is_empty(), "{text}");
        for ins in &found {
            let v = ins.vertices(&sc);
            let s = sc.surface();
            let sides: Vec<f64> = (0..4).map(|k| s.dist(v[k].coords(), v[(k + 1) % 4].coords())).collect();
            for side in &sides {
                assert!((side - sides[0]).abs() < 1e-7, "{sides:?}");
            }
        }
    }
}
