//! Move a line between the (xi, eta) chart, the conformal chart and Pluecker coordinates.

use paraplex::convert::{convert, ConvertKind};
use paraplex::linespace::{self, LinePoint};
use serde_json::json;

fn main() -> paraplex::Result<()> {
    let l = LinePoint::new((0.3, 0.1), (0.2, -0.4));
    let z = linespace::to_conformal(&l)?;
    println!("xi = {:?}, eta = {:?}", l.xi, l.eta);
    println!("Z1 = {:?}, Z2 = {:?}", z.z1, z.z2);
    let back = linespace::from_conformal(&z);
    println!("back: xi = {:?}, eta = {:?}", back.xi, back.eta);

    // a line through two points of R^3
    let (s, t) = ([1.0, 0.5, 2.0], [0.0, -0.5, -1.0]);
    let px = linespace::pluecker(s, t)?;
    println!("pluecker p = {:?}, q = {:?}, p.q = {:e}", px.p, px.q, px.relation());
    println!("X via pluecker = {:?}", linespace::conformal_from_pluecker(&px)?);
    println!("X via (xi, eta) = {:?}", linespace::to_conformal(&linespace::line_through_points(s, t)?)?.chart());

    // the JSON converters behind `paraplex convert`
    for (kind, payload) in [
        (ConvertKind::XiEtaToConformal, json!({"xi": [0.3, 0.1], "eta": [0.2, -0.4]})),
        (ConvertKind::PointsToPluecker, json!({"s": [0, 0, 1], "t": [1, 0, 1]})),
    ] {
        println!("{}: {}", kind.name(), convert(kind, payload)?);
    }
    Ok(())
}
