use std::collections::BTreeMap;

use circwalk::classifier::classify;
use circwalk::graph::symmetric_sets;

fn main() {
    for n in [4usize, 6, 8, 10, 12, 16, 32] {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for g in symmetric_sets(n).take(1 << 16) {
            let c = classify(&g);
            *counts
                .entry(format!("{:?}/{:?}", c.verdict, c.citation))
                .or_default() += 1;
        }
        println!("n={n}: {counts:?}");
    }
}
