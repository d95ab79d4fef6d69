//! Minimal fixed-topology tensor engine: tensors, convolution with exact
//! backward passes, the light U-Net, L2 loss, AdamW, and gradient checking.

pub mod adamw;
pub mod conv;
pub mod gradcheck;
pub mod ops;
pub mod tensor;
pub mod unet;

pub use adamw::{adamw_step, AdamWConfig, OptimizerState};
pub use conv::{conv2d_backward, conv2d_forward, ConvGrads, ConvLayer, ConvScratch};
pub use gradcheck::grad_check;
pub use ops::{
    concat_channels, maxpool2x2_backward, maxpool2x2_forward, mse_loss, relu_backward,
    relu_forward, split_channels, upsample2x2_backward, upsample2x2_forward,
};
pub use tensor::{Scalar, Tensor4};
pub use unet::{param_count, ForwardCache, ModelGrads, ModelParams, UNetConfig};
