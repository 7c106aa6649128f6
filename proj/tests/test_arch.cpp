#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "nss/arch.hpp"
#include "support/test_util.hpp"

using namespace nss;
using testutil::conv_layer;
using testutil::dense_layer;
using testutil::plain_layer;

namespace {

Architecture three_conv_stack() {
    Architecture arch;
    arch.id = "stack";
    arch.input_shape = Shape{3, 32, 32};
    arch.layers.push_back(conv_layer("c1", 3, 1, 1, 16));
    arch.layers.push_back(conv_layer("c2", 3, 1, 1, 32, {"c1"}));
    arch.layers.push_back(conv_layer("c3", 3, 1, 1, 64, {"c2"}));
    return arch;
}

bool has_violation(const ValidationReport& report, const std::string& needle) {
    for (const auto& v : report.violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("output_shape follows conv arithmetic") {
    auto conv = conv_layer("c", 3, 1, 1, 16);
    CHECK(output_shape(conv, {Shape{3, 32, 32}}) == Shape{16, 32, 32});

    LayerDescriptor pool = plain_layer("p", LayerKind::max_pool, {"c"});
    pool.kernel_h = 2;
    pool.kernel_w = 2;
    pool.stride = 2;
    pool.padding = 0;
    CHECK(output_shape(pool, {Shape{16, 32, 32}}) == Shape{16, 16, 16});

    auto degenerate = conv_layer("d", 7, 1, 0, 8);
    CHECK_THROWS_WITH_AS(output_shape(degenerate, {Shape{3, 5, 5}}),
                         doctest::Contains("degenerate shape"), std::runtime_error);
}

TEST_CASE("output_shape handles joins and reshapes") {
    auto add = plain_layer("a", LayerKind::add, {"x", "y"});
    CHECK(output_shape(add, {Shape{16, 8, 8}, Shape{16, 8, 8}}) == Shape{16, 8, 8});
    CHECK_THROWS_AS(output_shape(add, {Shape{16, 8, 8}, Shape{8, 8, 8}}),
                    std::invalid_argument);

    auto cat = plain_layer("c", LayerKind::concat, {"x", "y"});
    CHECK(output_shape(cat, {Shape{16, 8, 8}, Shape{8, 8, 8}}) == Shape{24, 8, 8});
    CHECK_THROWS_AS(output_shape(cat, {Shape{16, 8, 8}, Shape{8, 4, 8}}),
                    std::invalid_argument);

    auto flat = plain_layer("f", LayerKind::flatten, {"x"});
    CHECK(output_shape(flat, {Shape{16, 4, 4}}) == Shape{256, 1, 1});
    auto gap = plain_layer("g", LayerKind::global_avg_pool, {"x"});
    CHECK(output_shape(gap, {Shape{16, 4, 4}}) == Shape{16, 1, 1});
    auto dense = dense_layer("d", 10, {"g"});
    CHECK(output_shape(dense, {Shape{16, 1, 1}}) == Shape{10, 1, 1});
}

TEST_CASE("validate accepts a well-formed stack") {
    CHECK(validate(three_conv_stack()).ok());
}

TEST_CASE("validate flags shape mismatch at add") {
    Architecture arch;
    arch.id = "bad-add";
    arch.input_shape = Shape{3, 32, 32};
    arch.layers.push_back(conv_layer("a", 3, 1, 1, 16));
    arch.layers.push_back(conv_layer("b", 3, 1, 1, 8));
    arch.layers.push_back(plain_layer("join", LayerKind::add, {"a", "b"}));
    const auto report = validate(arch);
    CHECK_FALSE(report.ok());
    CHECK(has_violation(report, "shape mismatch at add"));
}

TEST_CASE("validate detects cycles") {
    Architecture arch;
    arch.id = "cycle";
    arch.input_shape = Shape{3, 8, 8};
    arch.layers.push_back(plain_layer("r1", LayerKind::relu, {"r2"}));
    arch.layers.push_back(plain_layer("r2", LayerKind::relu, {"r1"}));
    const auto report = validate(arch);
    CHECK_FALSE(report.ok());
    CHECK(has_violation(report, "cycle detected"));
}

TEST_CASE("validate enforces field presence and arity") {
    Architecture arch;
    arch.id = "bad-fields";
    arch.input_shape = Shape{3, 8, 8};
    auto relu = plain_layer("r", LayerKind::relu);
    relu.stride = 1;  // window fields are only legal on conv/pool kinds
    arch.layers.push_back(relu);
    CHECK(has_violation(validate(arch), "not allowed"));

    Architecture missing;
    missing.id = "missing";
    missing.input_shape = Shape{3, 8, 8};
    auto conv = conv_layer("c", 3, 1, 1, 16);
    conv.out_channels.reset();
    missing.layers.push_back(conv);
    CHECK(has_violation(validate(missing), "missing out_channels"));

    Architecture join;
    join.id = "join";
    join.input_shape = Shape{3, 8, 8};
    join.layers.push_back(conv_layer("c", 3, 1, 1, 3));
    join.layers.push_back(plain_layer("a", LayerKind::add, {"c"}));
    CHECK(has_violation(validate(join), ">= 2 inputs"));

    Architecture two_tails;
    two_tails.id = "tails";
    two_tails.input_shape = Shape{3, 8, 8};
    two_tails.layers.push_back(conv_layer("c1", 3, 1, 1, 4));
    two_tails.layers.push_back(conv_layer("c2", 3, 1, 1, 4));
    CHECK(has_violation(validate(two_tails), "exactly one output layer"));
}

TEST_CASE("count_parameters matches the layer formulas") {
    Architecture conv_only;
    conv_only.id = "single";
    conv_only.input_shape = Shape{3, 32, 32};
    conv_only.layers.push_back(conv_layer("c", 3, 1, 1, 16));
    CHECK(count_parameters(conv_only) == 448);  // 3*3*3*16 + 16

    Architecture untrainable;
    untrainable.id = "plain";
    untrainable.input_shape = Shape{4, 8, 8};
    auto pool = plain_layer("p", LayerKind::avg_pool);
    pool.kernel_h = 2;
    pool.kernel_w = 2;
    pool.stride = 2;
    pool.padding = 0;
    untrainable.layers.push_back(pool);
    untrainable.layers.push_back(plain_layer("r", LayerKind::relu, {"p"}));
    CHECK(count_parameters(untrainable) == 0);

    Architecture head;
    head.id = "dense";
    head.input_shape = Shape{64, 1, 1};
    head.layers.push_back(dense_layer("d", 10));
    CHECK(count_parameters(head) == 650);  // 64*10 + 10
}

TEST_CASE("count_flops matches the workload convention") {
    Architecture conv_only;
    conv_only.id = "single";
    conv_only.input_shape = Shape{3, 32, 32};
    conv_only.layers.push_back(conv_layer("c", 3, 1, 1, 16));
    CHECK(count_flops(conv_only) == 884736);  // 2*3*3*3*16*32*32

    Architecture relu_only;
    relu_only.id = "relu";
    relu_only.input_shape = Shape{16, 32, 32};
    relu_only.layers.push_back(plain_layer("r", LayerKind::relu));
    CHECK(count_flops(relu_only) == 16384);

    Architecture empty;
    empty.id = "empty";
    empty.input_shape = Shape{3, 32, 32};
    CHECK(validate(empty).ok());
    CHECK(count_flops(empty) == 0);
    CHECK(count_parameters(empty) == 0);
}

TEST_CASE("json round trip preserves structure and metrics") {
    const Architecture arch = three_conv_stack();
    const std::string text = to_json(arch, true);
    const Architecture parsed = architecture_from_json(text);
    CHECK(parsed == arch);
    CHECK(canonical_json(parsed) == canonical_json(arch));
    CHECK(count_parameters(parsed) == count_parameters(arch));
    CHECK(count_flops(parsed) == count_flops(arch));
}

TEST_CASE("json parser rejects unknown fields and malformed kernels") {
    CHECK_THROWS_WITH_AS(
        architecture_from_json(R"({"id":"x","input_shape":[1,2,3],"layers":[],"extra":1})"),
        doctest::Contains("unknown field"), std::runtime_error);
    CHECK_THROWS_AS(
        architecture_from_json(
            R"({"id":"x","input_shape":[1,2,3],"layers":[{"id":"c","kind":"conv2d","inputs":[],"kernel":[3],"stride":1,"padding":0,"out_channels":4}]})"),
        std::runtime_error);
    CHECK_THROWS_AS(architecture_from_json(R"({"id":"x","input_shape":[1,2],"layers":[]})"),
                    std::runtime_error);
}

TEST_CASE("content id ignores the stored id") {
    Architecture a = three_conv_stack();
    Architecture b = three_conv_stack();
    b.id = "renamed";
    CHECK(content_id(a) == content_id(b));
    b.layers[0].out_channels = 17;
    CHECK(content_id(a) != content_id(b));
}
