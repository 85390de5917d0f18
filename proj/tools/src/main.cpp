#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "segbias/error.hpp"
#include "segbias/types.hpp"

int main(int argc, char** argv) {
    CLI::App app{"segbias: ordinal-bias auditing and manipulation for "
                 "temporal action-segmentation datasets"};
    app.set_version_flag("--version", segbias::kVersion);
    app.set_config("--config", "", "TOML-style config mirroring all flags; flags override");
    app.require_subcommand(1);

    segbias::cli::register_audit(app);
    segbias::cli::register_manipulate(app);
    segbias::cli::register_eval(app);
    segbias::cli::register_baseline(app);
    segbias::cli::register_synth(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const segbias::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.kind() == segbias::ErrorKind::input ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
