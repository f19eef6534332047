//! p-curvature nilpotence as G-operator evidence: Apery's operator versus d/dz - 1.

use holodenom::pcurvature::{nilpotence_report, p_curvature, reduce_system};
use holodenom::{DiffOp, PrimeWindow};

fn main() {
    let window = PrimeWindow::new(2, 31).unwrap();
    let apery = DiffOp::apery();
    let exp = DiffOp::from_ints(&[&[-1], &[1]]).unwrap();
    for (name, l) in [("apery", &apery), ("exp", &exp)] {
        let verdicts: Vec<String> = nilpotence_report(l, &window)
            .iter()
            .map(|v| format!("{}:{:?}", v.p, v.status))
            .collect();
        println!("{name}: {}", verdicts.join(" "));
    }

    let g = p_curvature(&reduce_system(&apery, 7).unwrap());
    println!("apery mod 7: denominator power e = {}, degree trace {:?}", g.e, g.degree_trace);
}
