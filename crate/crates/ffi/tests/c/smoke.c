#include <stdio.h>
#include <string.h>
#include "catmads.h"

static int quad(void *user, const char *point, double *f, double *g) {
    (void)user;
    (void)g;
    double x = 0.0, y = 0.0;
    const char *c = strstr(point, "\"cont\":[");
    if (!c || sscanf(c + 8, "%lf,%lf", &x, &y) != 2) {
        return 1;
    }
    *f = (x - 1.0) * (x - 1.0) + (y + 0.5) * (y + 0.5);
    return 0;
}

int main(void) {
    const char *def = "{\"variables\":[{\"kind\":\"continuous\",\"lb\":-3,\"ub\":3},"
                      "{\"kind\":\"continuous\",\"lb\":-3,\"ub\":3}],\"n_constraints\":0}";
    CatmadsProblem *problem = NULL;
    CatmadsConfig *config = NULL;
    CatmadsResult *result = NULL;
    if (catmads_problem_callback(def, quad, NULL, &problem) != CATMADS_STATUS_OK) return 10;
    if (catmads_config_from_json("{\"budget\": 300, \"seed\": 5}", &config) != CATMADS_STATUS_OK) return 11;
    if (catmads_solve(problem, config, &result) != CATMADS_STATUS_OK) return 12;
    double f = -1.0;
    if (catmads_result_best_f(result, &f) != CATMADS_STATUS_OK) return 13;
    char *term = catmads_result_termination(result);
    printf("%.12g %llu %s\n", f, (unsigned long long)catmads_result_evaluations(result), term);
    catmads_string_free(term);
    if (catmads_problem_builtin("missing", &problem) != CATMADS_STATUS_UNKNOWN_PROBLEM) return 14;
    if (catmads_last_error() == NULL) return 15;
    catmads_result_free(result);
    catmads_config_free(config);
    catmads_problem_free(problem);
    return f < 1e-4 ? 0 : 16;
}
