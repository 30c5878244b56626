//! Fully-connected softmax classifier trained with AdaMax.
//!
//! Parameters live in one flat vector, layer by layer, each layer storing its
//! `outputs x inputs` weight matrix row-major followed by its biases. Gradients
//! and optimizer state share that layout.

mod adamax;
mod io;
mod model;
mod train;

pub use adamax::AdaMaxState;
pub use io::{load_model, save_model, MODEL_FILE_VERSION};
pub use model::{cross_entropy, Activation, BatchGradient, MlpModel, PROB_FLOOR};
pub use train::{accuracy, train, train_arrays, EpochMetrics, TrainConfig, Trained};
