#include <stdio.h>
#include <stdint.h>
#include <string.h>
#include "watershed.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    int64_t seq[] = {2, 6, 1, 5, 4, 3};
    size_t k = 0;
    CHECK(ws_watershed(seq, 6, &k) == WS_STATUS_OK);
    CHECK(k == 2);
    CHECK(ws_watershed(seq, 5, &k) == WS_STATUS_DOMAIN);
    CHECK(strlen(ws_last_error()) > 0);

    char *count = NULL;
    CHECK(ws_watershed_count(2, 1, &count) == WS_STATUS_OK);
    CHECK(strcmp(count, "6") == 0);
    ws_string_free(count);

    uint64_t a[] = {1}, b[] = {1};
    WsHikitaParams *params = NULL;
    CHECK(ws_hikita_params_new(a, b, 1, "2", &params) == WS_STATUS_OK);
    WsRationalVec *dist = NULL;
    CHECK(ws_hikita_distribution(params, &dist) == WS_STATUS_OK);
    CHECK(ws_rational_vec_len(dist) == 2);
    CHECK(strcmp(ws_rational_vec_get(dist, 1), "2/3") == 0);
    ws_rational_vec_free(dist);

    WsSampler *sampler = NULL;
    CHECK(ws_sampler_new(params, 42, &sampler) == WS_STATUS_OK);
    int64_t out[2];
    size_t len = 0;
    CHECK(ws_sampler_next(sampler, out, 2, &len) == WS_STATUS_OK);
    CHECK(len == 2);
    ws_sampler_free(sampler);
    ws_hikita_params_free(params);

    size_t town = 0;
    CHECK(ws_bulldozer_unsweepable(seq, 6, &town) == WS_STATUS_OK);
    CHECK(town == 3);

    printf("ok\n");
    return 0;
}
