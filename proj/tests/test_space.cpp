#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <fstream>
#include <map>

#include "nss/csv.hpp"
#include "nss/space.hpp"
#include "support/test_util.hpp"

using namespace nss;

namespace {

SearchSpace tiny_space() {
    SearchSpace s;
    s.id = "tiny";
    s.tmpl = TemplateKind::plain_sequence;
    s.input_shape = Shape{1, 8, 8};
    VariableSpec kh{"kernel_h_1", VariableSpec::Kind::choice, {1, 3}, 0, 0};
    VariableSpec kw{"kernel_w_1", VariableSpec::Kind::choice, {1, 3}, 0, 0};
    VariableSpec c{"out_channels_1", VariableSpec::Kind::int_range, {}, 1, 4};
    s.variables = {kh, kw, c};
    return s;
}

}  // namespace

TEST_CASE("cardinality of the example space matches the published count") {
    CHECK(cardinality(builtin_space("example3")) == 8589934592ULL);
}

TEST_CASE("cardinality multiplies option counts") {
    SearchSpace s = tiny_space();
    s.variables[0].choices = {3};
    s.variables[1].choices = {3};
    s.variables[2].min = 5;
    s.variables[2].max = 5;
    CHECK(cardinality(s) == 1);

    SearchSpace two = tiny_space();
    two.variables.erase(two.variables.begin() + 1);
    two.variables[0].choices = {1, 3};
    two.variables[1].min = 1;
    two.variables[1].max = 4;
    CHECK(cardinality(two) == 8);
}

TEST_CASE("materialize builds the documented 3-conv reference") {
    const SearchSpace space = builtin_space("example3");
    const Architecture arch = materialize(space, space.reference_assignment);
    CHECK(arch.layers.size() == 3);
    CHECK(count_parameters(arch) == 23584);
    CHECK(validate(arch).ok());
}

TEST_CASE("materialize reports rating violations by variable name") {
    const SearchSpace space = builtin_space("example3");
    Assignment a = space.reference_assignment;
    a["out_channels_1"] = 129;
    CHECK_THROWS_WITH_AS(materialize(space, a),
                         doctest::Contains("rating violation: out_channels"),
                         std::runtime_error);

    Assignment missing = space.reference_assignment;
    missing.erase("kernel_h_2");
    CHECK_THROWS_WITH_AS(materialize(space, missing), doctest::Contains("missing variable"),
                         std::runtime_error);

    Assignment extra = space.reference_assignment;
    extra["bogus"] = 1;
    CHECK_THROWS_WITH_AS(materialize(space, extra), doctest::Contains("unknown variable"),
                         std::runtime_error);
}

TEST_CASE("residual template with depth 1 contains exactly one add") {
    const SearchSpace space = builtin_space("residual3");
    Assignment a = space.reference_assignment;
    a["depth"] = 1;
    const Architecture arch = materialize(space, a);
    int adds = 0;
    for (const auto& layer : arch.layers)
        if (layer.kind == LayerKind::add) ++adds;
    CHECK(adds == 1);
    CHECK(validate(arch).ok());
}

TEST_CASE("every in-rating assignment materializes to a valid architecture") {
    for (const auto& name : builtin_space_names()) {
        const SearchSpace space = builtin_space(name);
        Rng rng(7);
        for (int i = 0; i < 200; ++i) {
            const Architecture arch = materialize(space, draw_assignment(space, rng));
            CAPTURE(name);
            CHECK(validate(arch).ok());
        }
    }
}

TEST_CASE("sample_uniform is deterministic per seed") {
    const SearchSpace space = builtin_space("example3");
    CHECK(sample_uniform(space, 42).id == sample_uniform(space, 42).id);
    CHECK(sample_uniform(space, 42).id != sample_uniform(space, 43).id);
}

TEST_CASE("choice variables are uniform under a chi-square test") {
    const SearchSpace space = builtin_space("example3");
    std::map<std::int64_t, int> counts;
    const int n = 100000;
    Rng rng(1234);
    for (int i = 0; i < n; ++i) counts[draw_assignment(space, rng).at("kernel_h_1")] += 1;
    REQUIRE(counts.size() == 4);
    const double expected = n / 4.0;
    double chi2 = 0.0;
    for (const auto& [value, count] : counts) {
        const double d = count - expected;
        chi2 += d * d / expected;
    }
    // chi-square critical value, df = 3, significance 0.01
    CHECK(chi2 < 11.345);
}

TEST_CASE("reference inclusion: built-in spaces materialize their stored reference") {
    for (const auto& name : builtin_space_names()) {
        const SearchSpace space = builtin_space(name);
        REQUIRE_FALSE(space.reference_assignment.empty());
        const Architecture reference = materialize(space, space.reference_assignment);
        const std::string stored =
            read_text_file(std::string(NSS_DATA_DIR) + "/references/" + name + ".json");
        CAPTURE(name);
        CHECK(canonical_json(reference) == canonical_json(architecture_from_json(stored)));
        CHECK(stored == to_json(reference, true));
    }
}

TEST_CASE("space json round trip and builtin files agree") {
    for (const auto& name : builtin_space_names()) {
        const SearchSpace space = builtin_space(name);
        const SearchSpace parsed = space_from_json(to_json(space));
        CHECK(parsed.id == space.id);
        CHECK(parsed.variables.size() == space.variables.size());
        CHECK(parsed.reference_assignment == space.reference_assignment);
        CHECK(to_json(parsed) == to_json(space));

        const std::string stored =
            read_text_file(std::string(NSS_DATA_DIR) + "/spaces/" + name + ".json");
        CHECK(stored == to_json(space, true));
    }
}

TEST_CASE("space json rejects malformed documents") {
    CHECK_THROWS_AS(space_from_json(R"({"id":"x"})"), std::exception);
    CHECK_THROWS_WITH_AS(
        space_from_json(
            R"({"id":"x","template":"plain_sequence","input_shape":[1,2,3],"variables":[],"bogus":1})"),
        doctest::Contains("unknown field"), std::runtime_error);
    CHECK_THROWS_AS(
        space_from_json(
            R"({"id":"x","template":"plain_sequence","input_shape":[1,2,3],"variables":[{"name":"v","kind":"choice","choices":[]}]})"),
        std::runtime_error);
}

TEST_CASE("uniform sampling skews toward large parameter counts") {
    const SearchSpace space = builtin_space("example3");
    const int n = 100000;
    std::array<int, 8> decades{};  // decade d counts params in [10^d, 10^(d+1))
    std::uint64_t max_params = 0;
    Rng rng(99);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t params =
            count_parameters(materialize(space, draw_assignment(space, rng)));
        max_params = std::max(max_params, params);
        int d = 0;
        for (std::uint64_t v = params; v >= 10; v /= 10) ++d;
        decades[static_cast<std::size_t>(d)] += 1;
    }
    int mode = 0;
    for (int d = 1; d < 8; ++d)
        if (decades[d] > decades[mode]) mode = d;
    // The mode decade is the top fully-covered decade of the range
    // (the maximum, ~1.6e6, barely enters its decade).
    CHECK(mode == 5);
    CHECK(max_params > 1000000);
    CHECK(max_params < 10000000);
}
