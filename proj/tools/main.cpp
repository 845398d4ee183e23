#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_commands.hpp"

int main(int argc, char** argv) {
    using namespace pathdist;

    CLI::App app{"Path-length distance between phylogenetic trees"};
    app.require_subcommand(1);

    cli::ComputeConfig compute;
    std::string method = "fast";
    auto* compute_cmd = app.add_subcommand("compute", "Distance between the trees in two Newick files");
    compute_cmd->add_option("tree1", compute.first_path, "First Newick file")->required();
    compute_cmd->add_option("tree2", compute.second_path, "Second Newick file")->required();
    compute_cmd->add_option("--method", method, "fast or quadratic")
        ->check(CLI::IsMember({"fast", "quadratic"}));
    compute_cmd->add_flag("--sqrt", compute.print_sqrt, "Also print the square root of delta");
    compute_cmd->add_flag("--topology-only", compute.topology_only, "Ignore branch lengths (all 1.0)");

    cli::VerifyConfig verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check the fast method against brute force on random trees");
    verify_cmd->add_option("--min-n", verify.min_n, "Smallest tree size")->capture_default_str();
    verify_cmd->add_option("--max-n", verify.max_n, "Largest tree size")->capture_default_str();
    verify_cmd->add_option("--trials", verify.trials, "Number of random pairs")->capture_default_str();
    verify_cmd->add_option("--seed", verify.seed, "Base seed")->capture_default_str();
    verify_cmd->add_flag("--inject-fault", verify.inject_fault, "Corrupt fast results (harness self-test)");

    cli::BenchConfig bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time fast and quadratic methods on random pairs");
    bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated tree sizes")->delimiter(',')->required();
    bench_cmd->add_option("--seed", bench.seed, "Instance seed")->capture_default_str();
    bench_cmd->add_option("--csv", bench.csv_path, "Write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kInputError;
    }

    if (*compute_cmd) {
        compute.method = method == "quadratic" ? Method::quadratic : Method::fast;
        return cli::cmd_compute(compute, std::cout, std::cerr);
    }
    if (*verify_cmd) {
        return cli::cmd_verify(verify, std::cout, std::cerr);
    }
    return cli::cmd_bench(bench, std::cout, std::cerr);
}
