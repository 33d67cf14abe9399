//! Generators for the canonical adversarial instances, random agent
//! populations, and the capacity augmentation transform.

mod canonical;
mod random;
mod tap_plus;

pub use canonical::{
    chain_agent_levels, chain_level_sizes, chain_property_probability, fig1_k_from_epsilon, gen_chain,
    gen_fig1, gen_fig1_eps, gen_sd_tight, gen_yao_distribution, has_chain_property,
};
pub use random::{augment, default_population, random_population};
pub use tap_plus::{
    all_strict_orders, gen_tap_plus, gen_tap_plus_all_orders, object_serial_dictatorship, PreferenceProfile,
    TapPlus,
};
