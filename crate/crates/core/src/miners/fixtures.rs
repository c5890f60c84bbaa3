use super::dataset::{Column, Dataset, Value};
use crate::rng::Seed;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Two informative numeric features `x0, x1`, one noise feature `x2` and a
/// class column `!defect` with labels `yes` (minority) and `no`. Minority
/// rows sit around `(1, 1)`, majority rows around `(0, 0)`, both with unit
/// spread, so the classes overlap.
pub fn imbalanced_fixture(minority: usize, ratio: usize, seed: Seed) -> Dataset {
    let mut rng = seed.rng();
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let columns = vec![
        Column::numeric("x0"),
        Column::numeric("x1"),
        Column::numeric("x2"),
        Column::class("defect"),
    ];
    let mut rows = Vec::with_capacity(minority * (ratio + 1));
    for i in 0..minority * (ratio + 1) {
        let positive = i % (ratio + 1) == 0;
        let centre = if positive { 1.0 } else { 0.0 };
        rows.push(vec![
            Value::Num(centre + noise.sample(&mut rng)),
            Value::Num(centre + noise.sample(&mut rng)),
            Value::Num(rng.gen_range(0.0..1.0)),
            Value::Cat(if positive { "yes" } else { "no" }.into()),
        ]);
    }
    Dataset::new(columns, rows).expect("fixture is well formed")
}
