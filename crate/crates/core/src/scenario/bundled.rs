/// A scenario shipped inside the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundledScenario {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(BundledScenario {
            name: $name,
            text: include_str!(concat!("../../scenarios/", $name, ".toml")),
        }),*]
    };
}

static BUNDLED: &[BundledScenario] = bundle![
    "jaynes_cummings_rabi",
    "qubit_semiclassical_drive",
    "golden_rule_scaling",
    "neo_classical_qubit",
    "beam_splitter_resonance",
    "energy_audit_semiclassical",
    "energy_audit_semiclassical_detuned",
    "neo_classical_oscillator",
    "gravito_constants",
];

pub fn bundled() -> &'static [BundledScenario] {
    BUNDLED
}

pub fn find_bundled(name: &str) -> Option<&'static BundledScenario> {
    BUNDLED.iter().find(|b| b.name == name)
}
