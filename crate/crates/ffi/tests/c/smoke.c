#include <stdio.h>
#include <string.h>

#include "susco.h"

static const char *CONFIG =
    "seed = 3\n"
    "num_intervals = 3\n"
    "dish_catalog = \"dishes.csv\"\n";

int main(int argc, char **argv) {
    if (argc < 3) {
        fprintf(stderr, "usage: smoke <catalog dir> <out dir>\n");
        return 10;
    }
    SuscoSimulation *sim = NULL;
    if (susco_simulation_from_toml(CONFIG, argv[1], &sim) != SUSCO_STATUS_OK) {
        fprintf(stderr, "create: %s\n", susco_last_error_message());
        return 11;
    }
    if (susco_simulation_run(sim) != SUSCO_STATUS_OK) {
        return 12;
    }
    uint32_t n = 0;
    susco_simulation_interval_count(sim, &n);
    if (n != 3) {
        return 13;
    }
    SuscoIntervalMetrics m;
    if (susco_simulation_metrics(sim, 2, &m) != SUSCO_STATUS_OK || m.interval != 2) {
        return 14;
    }
    if (susco_simulation_metrics(sim, 3, &m) != SUSCO_STATUS_OUT_OF_RANGE) {
        return 15;
    }
    if (susco_simulation_write_outputs(sim, argv[2]) != SUSCO_STATUS_OK) {
        return 16;
    }
    susco_simulation_free(sim);

    double cost = 0.0;
    susco_dish_cost(8000.0, 800.0, 0.09, 0.17, &cost);
    if (cost < 1.7899 || cost > 1.7901) {
        return 17;
    }
    if (susco_simulation_from_file("/nonexistent/config.toml", &sim) != SUSCO_STATUS_IO) {
        return 18;
    }
    printf("ok %s %u %s\n", susco_version(), m.tasks_total, strlen(susco_last_error_message()) > 0 ? "err" : "");
    return 0;
}
