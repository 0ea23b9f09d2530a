#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "hmc/config.hpp"
#include "hmc/errors.hpp"

using namespace hmc;

namespace {

const WallBC& wall(const SimulationConfig& c, Wall w) { return c.bc[static_cast<int>(w)]; }

std::string error_text(const std::string& ini) {
    try {
        parse_config_string(ini);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Presets, Example1aBoundaryData) {
    const SimulationConfig c = preset_config("example1a");
    EXPECT_EQ(wall(c, Wall::left).flow, FlowBC::flux);
    EXPECT_DOUBLE_EQ(wall(c, Wall::left).flux, 2e-4);
    ASSERT_TRUE(wall(c, Wall::left).c_in.has_value());
    EXPECT_DOUBLE_EQ(*wall(c, Wall::left).c_in, 0.5);
    EXPECT_EQ(wall(c, Wall::right).flow, FlowBC::pressure);
    EXPECT_DOUBLE_EQ(wall(c, Wall::right).pressure, 1e5);
    EXPECT_EQ(wall(c, Wall::top).mechanics, MechanicsBC::traction);
    EXPECT_EQ(wall(c, Wall::top).traction, Vec2(0, -2e6));
    EXPECT_DOUBLE_EQ(c.p0, 1e6);
    EXPECT_DOUBLE_EQ(c.mesh.length, 100.0);
    EXPECT_DOUBLE_EQ(c.mesh.height, 30.0);
    EXPECT_NO_THROW(c.validate());
}

TEST(Presets, Example4AnisotropicTensor) {
    const SimulationConfig c = preset_config("example4");
    EXPECT_DOUBLE_EQ(c.material.k0(0, 0), 8.8e-10);
    EXPECT_DOUBLE_EQ(c.material.k0(1, 1), 8.8e-11);
    EXPECT_EQ(c.material.k0(0, 1), 0.0);
}

TEST(Presets, AllValidateAndUnknownRejected) {
    for (const auto& name : preset_names()) EXPECT_NO_THROW(preset_config(name).validate()) << name;
    EXPECT_TRUE(preset_config("example3").randfield.enabled);
    EXPECT_FALSE(preset_config("example2").layers.empty());
    EXPECT_THROW(preset_config("example9"), ConfigError);
}

TEST(ConfigText, RoundTripIsFixedPoint) {
    for (const auto& name : preset_names()) {
        const SimulationConfig c = preset_config(name);
        const std::string text = serialize_config(c);
        const SimulationConfig back = parse_config_string(text);
        EXPECT_TRUE(back == c) << name;
        EXPECT_EQ(serialize_config(back), text) << name;
    }
}

TEST(ConfigText, PresetOverridesApply) {
    const SimulationConfig c = parse_config_string(
        "# shorter run\n[scenario]\npreset = example1a\n\n[time]\nt_end = 100\n[rock]\nk = 1e-12, 2e-12\n"
        "[bc.left]\nflux = 1e-4\n");
    EXPECT_DOUBLE_EQ(c.time.t_end, 100.0);
    EXPECT_DOUBLE_EQ(c.material.k0(1, 1), 2e-12);
    EXPECT_DOUBLE_EQ(wall(c, Wall::left).flux, 1e-4);
    EXPECT_DOUBLE_EQ(*wall(c, Wall::left).c_in, 0.5);
}

TEST(ConfigText, LayersReplacePresetLayers) {
    const SimulationConfig c =
        parse_config_string("[scenario]\npreset = example2\n[layer.0]\nymin = 0\nymax = 30\nk = 1e-11\n");
    ASSERT_EQ(c.layers.size(), 1u);
    EXPECT_DOUBLE_EQ(c.layers[0].k(0, 0), 1e-11);
    EXPECT_NE(error_text("[layer.0]\nymin = 0\nk = 1\n").find("ymax"), std::string::npos);
}

TEST(ConfigErrors, TwoPressureConditionsOnOneWall) {
    EXPECT_THROW(parse_config_string("[bc.right]\npressure = 1e5\npressure = 2e5\n"), ParseError);
    EXPECT_THROW(parse_config_string("[bc.left]\nflow = flux\npressure = 1e5\n"), ParseError);
}

TEST(ConfigErrors, UnknownKeyAndSectionNamed) {
    EXPECT_NE(error_text("[rock]\nporosity = 0.2\n").find("porosity"), std::string::npos);
    EXPECT_NE(error_text("[rocks]\nphi0 = 0.2\n").find("rocks"), std::string::npos);
}

TEST(ConfigErrors, LineNumbersAndRanges) {
    try {
        parse_config_string("[rock]\nphi0 = 0.2\nnu = abc\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    EXPECT_NE(error_text("[rock]\nphi0 = 1.5\n").find("phi0"), std::string::npos);
    EXPECT_NE(error_text("[time]\ndt0 = -1\n").find("dt0"), std::string::npos);
    EXPECT_NE(error_text("[scenario]\npreset = nope\n").find("nope"), std::string::npos);
}

TEST(ConfigFile, ParseFromDisk) {
    const auto path = std::filesystem::temp_directory_path() / "hmc_config_test.ini";
    std::ofstream(path) << serialize_config(preset_config("example1b"));
    EXPECT_TRUE(parse_config(path) == preset_config("example1b"));
    EXPECT_THROW(parse_config(path.string() + ".missing"), IoError);
}

TEST(Terzaghi, UndrainedPressure) {
    MaterialParams m;
    m.alpha = 1.0;
    m.cf = 0.0;
    m.phi0 = 0.3;
    m.K = 1e8;
    // incompressible constituents carry the whole load in the fluid
    EXPECT_NEAR(undrained_pressure(m, 1e6) / 1e6, 1.0, 1e-3);
}
