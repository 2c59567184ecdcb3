#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iontrap/config.hpp"

using namespace iontrap;

namespace {

const char* kFullConfig = R"(# full example
[trap]
ion_count = 3
secular_frequency_hz = 123.5e3
ion_species = yb171

[field]
gradient_t_per_m = 18.8
bias_t = 0.24e-3
zero_reference = center

[pulses]
rabi_hz = 57.9e3, 57.9e3, 60e3
weight_sigma_minus = 0.5
duration_s = 8.64e-6

[benchmark]
n_values = 0, 1000, 2000
trials = 350
seed = 99
input_state = superposition
qubit = pi
addressed_ions = 1, 3
carrier_detuning_hz = 2e6

[model]
j_enabled = true
j_nn_hz = 33
sideband_eta = 0.01
readout_p = 0.96
)";

}  // namespace

TEST_CASE("full config round trip") {
  const RunConfig c = parse_config_text(kFullConfig);
  CHECK(c.ion_count == 3);
  CHECK(c.secular_frequency_hz == doctest::Approx(123.5e3));
  CHECK(c.gradient_t_per_m == doctest::Approx(18.8));
  CHECK(c.zero_reference == ZeroReference::kCenter);
  CHECK(c.rabi_hz.size() == 3);
  CHECK(c.rabi_hz[2] == doctest::Approx(60e3));
  CHECK(c.weight_sigma_minus == doctest::Approx(0.5));
  CHECK(c.n_values == std::vector<int>{0, 1000, 2000});
  CHECK(c.trials == 350);
  CHECK(c.seed == 99);
  CHECK(c.input_state == InputState::kSuperposition);
  CHECK(c.qubit_channel == Channel::kPi);
  CHECK(c.addressed_ions == std::vector<int>{1, 3});
  CHECK(c.carrier_detuning_hz == doctest::Approx(2e6));
  CHECK(c.j_enabled);
  CHECK(c.sideband_eta == doctest::Approx(0.01));
  CHECK(c.readout_p == doctest::Approx(0.96));

  const std::vector<int> addressed = addressed_ion_list(c);
  CHECK(addressed == std::vector<int>{0, 2});
}

TEST_CASE("defaults cover every section") {
  const RunConfig c = parse_config_text("[trap]\nion_count = 2\n");
  CHECK(c.ion_count == 2);
  CHECK(c.secular_frequency_hz == doctest::Approx(124e3));
  CHECK(c.readout_p == 1.0);
  CHECK(addressed_ion_list(c) == std::vector<int>{0, 1});
}

TEST_CASE("unknown keys and sections are rejected with line numbers") {
  try {
    parse_config_text("[trap]\nion_count = 2\nbananas = 7\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& error) {
    CHECK(error.line == 3);
    CHECK(std::string(error.what()).find("bananas") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[fruit]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("ion_count = 2\n"), ConfigError);      // key before section
  CHECK_THROWS_AS(parse_config_text("[trap]\nion_count 2\n"), ConfigError);  // missing '='
}

TEST_CASE("malformed values are rejected") {
  CHECK_THROWS_AS(parse_config_text("[trap]\nion_count = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[trap]\nion_count = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[benchmark]\ninput_state = catstate\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\nj_enabled = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[field]\nzero_reference = elsewhere\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[trap]\nion_species = ca40\n"), ConfigError);
}

TEST_CASE("validation catches inconsistent configurations") {
  CHECK_THROWS_AS(parse_config_text("[trap]\nion_count = 0\n"), ConfigError);
  // Two Rabi values for three ions.
  CHECK_THROWS_AS(parse_config_text("[trap]\nion_count = 3\n[pulses]\nrabi_hz = 1e3, 2e3\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[trap]\nion_count = 2\n[benchmark]\naddressed_ions = 5\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\nreadout_p = 0.3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[benchmark]\ntrials = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[benchmark]\nn_values = -5\n"), ConfigError);
}

TEST_CASE("register assembly honors the field reference point") {
  RunConfig config = parse_config_text(R"(
[trap]
ion_count = 2
[field]
gradient_t_per_m = 18.8
bias_t = 0.5e-3
zero_reference = ion1
[pulses]
rabi_hz = 20e3
)");
  const PhysicalConstants constants;
  const RegisterSetup at_first = build_register(config);
  // Field at the first ion equals the bias alone.
  CHECK(at_first.transitions.sigma_plus_hz[0] - at_first.transitions.pi_hz[0] ==
        doctest::Approx(constants.zeeman_hz_per_t * 0.5e-3).epsilon(1e-12));

  config.zero_reference = ZeroReference::kCenter;
  const RegisterSetup centered = build_register(config);
  const double mid = 0.5 * (centered.transitions.sigma_plus_hz[0] +
                            centered.transitions.sigma_plus_hz[1]);
  CHECK(mid - centered.transitions.pi_hz[0] ==
        doctest::Approx(constants.zeeman_hz_per_t * 0.5e-3).epsilon(1e-9));

  CHECK(at_first.readout.p_prep == 1.0);
  CHECK_FALSE(at_first.coupling.enabled);
}
