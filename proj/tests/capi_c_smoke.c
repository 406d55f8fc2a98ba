#include <math.h>
#include <stdio.h>

#include "demandfc/demandfc.h"

int main(void) {
    const double values[] = {10.0, 11.0, 12.5, 12.0, 13.0, 12.0, 11.5, 13.5, 14.0, 13.0, 13.5, 14.5};
    dfc_series* s = NULL;
    dfc_model* m = NULL;
    double forecast[2];
    int failures = 0;

    if (dfc_series_create(values, 12, 0, 3600, &s) != DFC_OK) return 1;
    if (dfc_model_fit(s, (dfc_order){0, 1, 0}, &m) != DFC_OK) {
        fprintf(stderr, "%s\n", dfc_last_error());
        dfc_series_free(s);
        return 1;
    }
    if (dfc_model_forecast(m, s, 2, 0, 0.0, forecast) != DFC_OK) failures++;
    if (forecast[0] != 14.5 || forecast[1] != 14.5) failures++;

    double p = 0.0;
    if (dfc_chi2_pvalue(87.758, 100, &p) != DFC_OK || fabs(p - 0.804) > 0.005) failures++;

    dfc_model_free(m);
    dfc_series_free(s);
    if (failures) fprintf(stderr, "%d C API checks failed\n", failures);
    return failures ? 1 : 0;
}
