use std::time::Instant;
use rand::{Rng, SeedableRng};

fn main() {
    let n = 20_000usize;
    let adds = 20_000usize;
    let reps = 200usize;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<u32> = (0..adds).map(|_| rng.random_range(0..n as u32)).collect();

    // two arrays (current layout)
    let t = Instant::now();
    let mut sink = 0.0f64;
    for _ in 0..reps {
        let mut values = vec![0.0f64; n];
        let mut touched = vec![false; n];
        let mut count = 0usize;
        for &r in &rows {
            let r = r as usize;
            values[r] += 1.5;
            if !touched[r] {
                touched[r] = true;
                count += 1;
            }
        }
        sink += values[17] + count as f64;
    }
    println!("two arrays: {:?} (sink {sink})", t.elapsed() / reps as u32);

    // interleaved (f64 value, u64 touched-flag)
    let t = Instant::now();
    let mut sink = 0.0f64;
    for _ in 0..reps {
        let mut cells = vec![(0.0f64, 0u64); n];
        let mut count = 0usize;
        for &r in &rows {
            let c = &mut cells[r as usize];
            c.0 += 1.5;
            if c.1 == 0 {
                c.1 = 1;
                count += 1;
            }
        }
        sink += cells[17].0 + count as f64;
    }
    println!("interleaved: {:?} (sink {sink})", t.elapsed() / reps as u32);

    // value-only + touched-row list (count via list, extract via list)
    let t = Instant::now();
    let mut sink = 0.0f64;
    for _ in 0..reps {
        let mut values = vec![0.0f64; n];
        let mut touched = vec![false; n];
        let mut list: Vec<u32> = Vec::with_capacity(adds);
        for &r in &rows {
            let ru = r as usize;
            values[ru] += 1.5;
            if !touched[ru] {
                touched[ru] = true;
                list.push(r);
            }
        }
        sink += values[17] + list.len() as f64;
    }
    println!("arrays + list: {:?} (sink {sink})", t.elapsed() / reps as u32);

    // extract-style scans
    let values = vec![1.0f64; n];
    let touched = vec![true; n];
    let t = Instant::now();
    let mut acc = 0.0;
    for _ in 0..reps {
        for (i, (&v, &tt)) in values.iter().zip(&touched).enumerate() {
            if tt { acc += v + i as f64; }
        }
    }
    println!("dense scan: {:?} (acc {acc})", t.elapsed() / reps as u32);
}
