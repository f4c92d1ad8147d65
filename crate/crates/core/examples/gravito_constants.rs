use std::f64::consts::TAU;

use energy_exchange::constants::ConstantsTable;
use energy_exchange::models::{
    gravito_classical_params_with, gravito_vacuum_coupling_with, gw_energy_density_with, GravitoParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = ConstantsTable::from_env()?;
    let bar = GravitoParams {
        mass: 1000.0,
        length: 1.0,
        nu: TAU * 1000.0,
        omega0: TAU * 1000.0,
        h0: 1e-21,
        volume: 1.0,
        detector_cutoff: 8,
    };
    let m = gravito_classical_params_with(&bar, &k)?;
    println!("constants             {} ({})", k.version, &k.hash()[..12]);
    println!("vacuum coupling       {:.6e} rad/s", gravito_vacuum_coupling_with(&bar, &k)?);
    println!("wave energy density   {:.6e} J/m^3", gw_energy_density_with(&bar, &k));
    println!("lambda                {:.6e} N/m", m.lambda_si);
    println!("zero-point length     {:.6e} m", m.zero_point_length);
    println!("lambda x_zpf          {:.6e} J", m.interaction_coefficient);
    println!("natural-unit drive    {:?}", m.driven);
    Ok(())
}
