//! Fit the apparent-height model h = a/d + b to noisy sign observations and
//! range new sightings with it.

use lanekeep::parking::{estimate_distance, fit_sign_distance_model, SignHeightSample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples: Vec<SignHeightSample> = (0..20)
        .map(|k| {
            let d = 0.3 + 0.12 * k as f64;
            SignHeightSample { pixel_height: 60.0 / d * (1.0 + rng.random_range(-0.02..0.02)) + 2.0, true_distance: d }
        })
        .collect();
    let m = fit_sign_distance_model(&samples).expect("well-spread samples");
    println!("h(d) = {:.3}/d + {:.3}  (fitted on {:.2}–{:.2} m)", m.a, m.b, m.fitted_range.0, m.fitted_range.1);
    for h in [200.0, 60.0, 30.0, 25.0, 2.5, 1.0] {
        match estimate_distance(&m, h) {
            Ok(e) => println!("{h:>6.1} px -> {:.3} m{}", e.distance, if e.range_clamped { " (clamped)" } else { "" }),
            Err(e) => println!("{h:>6.1} px -> {e}"),
        }
    }
}
