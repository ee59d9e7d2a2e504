//! Capital recovery factors and annualised investment.

use esopt::finance::{
    annualize, capital_recovery_factor, horizon_share, output_side_cost, AnnuityInput,
};

fn main() {
    println!("  i \\ n      10        20        30");
    for i in [0.0, 0.03, 0.05, 0.08] {
        let row: Vec<String> = [10, 20, 30]
            .iter()
            .map(|&n| format!("{:>8.5}", capital_recovery_factor(i, n)))
            .collect();
        println!("{:>5.2}  {}", i, row.join("  "));
    }

    let plant = AnnuityInput {
        total_investment: 1_000_000.0,
        interest_rate: 0.05,
        lifetime: 20,
    };
    let yearly = annualize(&plant);
    println!(
        "1 MEUR over 20 a at 5 %: {yearly:.2} EUR/a, {:.2} EUR for one week",
        horizon_share(yearly, 168.0)
    );
    println!(
        "input-side 3000 EUR/MW at 37 % efficiency: {:.2} EUR per MW of output",
        output_side_cost(3000.0, 0.37, 0.0)
    );
}
