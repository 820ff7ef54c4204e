#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "uavdnn/error.hpp"
#include "uavdnn/layer_shapes.hpp"
#include "uavdnn/scenario.hpp"

using namespace uavdnn;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Scenario, MinimalFileLoads)
{
    const auto s = parse_scenario(test::minimal_scenario_json(test::kTwoUavs));
    EXPECT_EQ(s.targets.size(), 1u);
    EXPECT_EQ(s.fleet.size(), 2u);
    EXPECT_EQ(s.leader().id, 0);
}

TEST(Scenario, ZeroTargetsRejected)
{
    auto text = test::minimal_scenario_json(test::kTwoUavs);
    const auto a = text.find("[{\"id\": 1, \"center\"");
    const auto b = text.find("}],", a) + 2;
    text.replace(a, b - a, "[]");
    EXPECT_NE(error_of(text).find("targets non-empty"), std::string::npos) << error_of(text);
}

TEST(Scenario, TwoLeadersRejected)
{
    std::string fleet = test::kTwoUavs;
    fleet.replace(fleet.find("\"follower\""), 10, "\"leader\"");
    const auto msg = error_of(test::minimal_scenario_json(fleet));
    EXPECT_NE(msg.find("exactly one leader"), std::string::npos) << msg;
}

TEST(Scenario, UnknownKeyRejected)
{
    auto text = test::minimal_scenario_json(test::kTwoUavs);
    text.insert(text.rfind('}'), ", \"colour\": 3");
    EXPECT_THROW(parse_scenario(text), ParseError);
    EXPECT_NE(error_of(text).find("colour"), std::string::npos);
}

TEST(Scenario, MalformedTextIsParseError)
{
    EXPECT_THROW(parse_scenario("{\"base\": "), ParseError);
}

TEST(Scenario, CanonicalRoundTrip)
{
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        const auto s = generate_random_scenario(6, 4, seed);
        const auto text = save_scenario(s);
        const auto back = parse_scenario(text);
        EXPECT_EQ(back, s);
        EXPECT_EQ(save_scenario(back), text);
    }
    const auto tiny = save_scenario(tiny_scenario());
    EXPECT_EQ(save_scenario(parse_scenario(tiny)), tiny);
}

TEST(Scenario, ShippedScenarioFilesAreCanonical)
{
    for (const char* name : {"tiny.json", "demo.json"}) {
        const auto path = std::filesystem::path(UAVDNN_DATA_DIR).parent_path() / "scenarios" / name;
        std::ifstream in(path);
        ASSERT_TRUE(in) << path;
        const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        EXPECT_EQ(save_scenario(load_scenario(path)), text) << name;
    }
}

TEST(Scenario, ProfileCsvReferenceResolvesRelativeToFile)
{
    const auto dir = std::filesystem::temp_directory_path() / "uavdnn_profile_ref";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "m.csv") << layer_profiles_csv(demo6_profile());
        auto text = test::minimal_scenario_json(test::kTwoUavs);
        const auto a = text.find("\"layers\"");
        const auto b = text.find("]}]", a) + 1;
        text.replace(a, b - a, "\"profile_csv\": \"m.csv\"");
        std::ofstream(dir / "s.json") << text;
    }
    const auto s = load_scenario(dir / "s.json");
    EXPECT_EQ(s.models.front().layers, demo6_profile().layers);
}

TEST(Generator, DeterministicPerSeed)
{
    EXPECT_EQ(generate_random_scenario(10, 9, 7), generate_random_scenario(10, 9, 7));
    const auto a = generate_random_scenario(10, 9, 7);
    const auto b = generate_random_scenario(10, 9, 8);
    EXPECT_NE(a.targets.front().center, b.targets.front().center);
}

TEST(Generator, TaskSizesWithinBounds)
{
    const auto s = generate_random_scenario(50, 9, 1);
    ASSERT_EQ(s.targets.size(), 50u);
    for (const auto& t : s.targets) {
        EXPECT_GE(t.task_size_gb, 0.0);
        EXPECT_LE(t.task_size_gb, 80.0);
    }
}

TEST(Generator, FuzzedScenariosSatisfyInvariants)
{
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const int targets = 1 + static_cast<int>(seed % 12);
        const int uavs = 2 + static_cast<int>(seed % 7);
        const auto s = generate_random_scenario(targets, uavs, seed);
        ASSERT_NO_THROW(validate(s)) << seed;
        for (const auto& t : s.targets) {
            ASSERT_DOUBLE_EQ(t.center.z, 0.0);
            ASSERT_GE(t.center.x, 0.0);
            ASSERT_LE(t.center.x, 12000.0);
            ASSERT_GE(t.center.y, 0.0);
            ASSERT_LE(t.center.y, 12000.0);
        }
        for (const auto& u : s.fleet)
            ASSERT_DOUBLE_EQ(u.position.z, 3000.0);
    }
}

TEST(LayerProfiles, FiveRowCsv)
{
    const auto p = parse_layer_profiles("layer_index,compute_cycles,memory_bytes,output_bits\n"
                                        "1,1e9,1e6,8\n2,1e9,1e6,8\n3,1e9,1e6,8\n4,1e9,1e6,8\n5,1e9,1e6,0\n");
    EXPECT_EQ(p.num_layers(), 5u);
    EXPECT_DOUBLE_EQ(p.total_compute(), 5e9);
}

TEST(LayerProfiles, ZeroComputeNamesRow)
{
    try {
        parse_layer_profiles("layer_index,compute_cycles,memory_bytes,output_bits\n1,1e9,1,1\n2,0,1,1\n");
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
}

TEST(LayerProfiles, MissingColumnRejected)
{
    EXPECT_THROW(parse_layer_profiles("layer_index,compute_cycles,memory_bytes\n1,1,1\n"), ParseError);
}

TEST(LayerProfiles, CsvRoundTrip)
{
    for (const auto& p : builtin_profiles())
        EXPECT_EQ(parse_layer_profiles(layer_profiles_csv(p), p.kind).layers, p.layers) << p.name;
}

// Standard AlexNet (single-tower, 224x224 input, 3x3/2 pooling) written out
// layer by layer, independent of the shape calculator.
TEST(LayerProfiles, ShippedAlexnetMatchesHandDerivedShapes)
{
    struct Expect {
        double macs;
        double params;
        double outputs;
    };
    const Expect hand[] = {
        {55.0 * 55 * 64 * 11 * 11 * 3, 11.0 * 11 * 3 * 64 + 64, 64.0 * 27 * 27},
        {27.0 * 27 * 192 * 5 * 5 * 64, 5.0 * 5 * 64 * 192 + 192, 192.0 * 13 * 13},
        {13.0 * 13 * 384 * 3 * 3 * 192, 3.0 * 3 * 192 * 384 + 384, 384.0 * 13 * 13},
        {13.0 * 13 * 256 * 3 * 3 * 384, 3.0 * 3 * 384 * 256 + 256, 256.0 * 13 * 13},
        {13.0 * 13 * 256 * 3 * 3 * 256, 3.0 * 3 * 256 * 256 + 256, 256.0 * 6 * 6},
        {9216.0 * 4096, 9216.0 * 4096 + 4096, 4096},
        {4096.0 * 4096, 4096.0 * 4096 + 4096, 4096},
        {4096.0 * 1000, 4096.0 * 1000 + 1000, 1000},
    };
    const auto shipped = load_layer_profiles(std::filesystem::path(UAVDNN_DATA_DIR) / "profiles" / "alexnet.csv", 2);
    ASSERT_EQ(shipped.num_layers(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
        const auto& l = shipped.layers[i];
        EXPECT_EQ(l.layer_index, static_cast<int>(i) + 1);
        EXPECT_DOUBLE_EQ(l.compute_cycles, 2.0 * hand[i].macs) << "layer " << i + 1;
        EXPECT_DOUBLE_EQ(l.output_bits, 32.0 * hand[i].outputs) << "layer " << i + 1;
        EXPECT_DOUBLE_EQ(l.memory_bytes, 4.0 * (hand[i].params + hand[i].outputs)) << "layer " << i + 1;
    }
}

TEST(LayerProfiles, ShippedCsvsMatchBuiltins)
{
    const auto dir = std::filesystem::path(UAVDNN_DATA_DIR) / "profiles";
    const std::pair<const char*, int> files[] = {{"yolov5.csv", 1}, {"alexnet.csv", 2}, {"vgg16.csv", 3}, {"demo6.csv", 4}};
    for (const auto& [file, kind] : files)
        EXPECT_EQ(load_layer_profiles(dir / file, kind).layers, builtin_profile(kind).layers) << file;
}
