//! Single-threaded SGD trainer: per-sample updates over a seeded shuffle.

use alloc::vec::Vec;

use super::{LabeledSample, Model};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub epochs: usize,
    pub final_accuracy: f64,
    pub final_mean_loss: f64,
}

/// Train in place. Deterministic given `seed`; `epochs = 0` leaves the
/// weights untouched and just reports accuracy.
pub fn train_sgd(
    model: &mut Model,
    dataset: &[LabeledSample],
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<TrainOutcome> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let first = dataset[0].label;
    if !dataset.iter().any(|s| s.label != first) {
        return Err(Error::InvalidConfig {
            what: alloc::string::String::from("dataset must contain at least 2 classes"),
        });
    }
    for s in dataset {
        if s.label >= model.class_count() {
            return Err(Error::LabelOutOfRange { label: s.label, classes: model.class_count() });
        }
    }

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut mean_loss = 0.0;
    for epoch in 0..epochs {
        let mut rng = StreamRng::from_key(seed, &[0x5347, epoch as u64]);
        // Fisher-Yates
        for i in (1..order.len()).rev() {
            let j = rng.next_below(i + 1);
            order.swap(i, j);
        }
        let mut loss_sum = 0.0;
        for &idx in &order {
            loss_sum += model.sgd_step(&dataset[idx], learning_rate)?;
        }
        mean_loss = loss_sum / dataset.len() as f64;
    }

    let mut correct = 0usize;
    for s in dataset {
        let logits = model.forward(&s.image)?;
        let pred = argmax(logits.data());
        if pred == s.label {
            correct += 1;
        }
    }
    Ok(TrainOutcome {
        epochs,
        final_accuracy: correct as f64 / dataset.len() as f64,
        final_mean_loss: mean_loss,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
