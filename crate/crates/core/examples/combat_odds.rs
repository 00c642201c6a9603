//! Hit probabilities per hit-chance level as earlier hits pile up, next to
//! rates measured from the seeded dice.
//!
//!     cargo run --example combat_odds

use gm_core::combat::{hit_probability, roll_hit, severity_damage, DamageSeverity, GameRng, HitChance};

fn main() {
    const TRIALS: u32 = 20_000;
    println!("{:<11} {}", "chance", (0..6).map(|k| format!("  {k} prior  ")).collect::<String>());
    for &chance in HitChance::ALL {
        let mut row = format!("{:<11}", chance.token());
        for prior in 0..6 {
            let mut rng = GameRng::from_seed(42);
            let hits = (0..TRIALS).filter(|_| roll_hit(&mut rng, chance, prior)).count();
            let measured = hits as f64 / TRIALS as f64;
            row.push_str(&format!(" {:.2} ({:.3})", hit_probability(chance, prior), measured));
        }
        println!("{row}");
    }
    println!();
    for &severity in DamageSeverity::ALL {
        println!("{:<14} {:>2} damage", severity.token(), severity_damage(severity));
    }
}
