//! What the validator reports for a broken system.

use esopt::model::*;

fn main() {
    let mut sys = EnergySystem::new(TimeGrid::hourly(4));
    sys.nodes = vec![
        Node::demand("Electricity", Profile::Series(vec![1.0, 2.0, 3.0])),
        Node::boundary("Gas"),
    ];

    let mut pv = Component::source("PV", "Electricity");
    pv.capacity = CapacitySpec::optimized(Some(10.0));
    pv.capacity.availability = Profile::Series(vec![0.0, 0.5, 1.3, 0.2]);
    let gt = Component::single("Gas Turbine", "Gas", "Hydrogen", 0.4);
    sys.components = vec![pv, gt];

    let mut bat = Storage::new("Battery", "Gas", RateMode::CRateLinked { c_rate: 1.0 });
    bat.charge_eff = 1.1;
    sys.storages = vec![bat];

    let report = validate_system(&sys);
    print!("{report}");
    println!("valid: {}", report.is_valid());
}
