/* C ABI for the coarse-ext library.
 *
 * Conventions:
 *   - Handles are opaque; create them here, free them here.
 *   - Fallible calls return a coarse_status and write results through out
 *     pointers. On failure, coarse_last_error_message() returns a
 *     thread-local description.
 *   - Strings are NUL-terminated UTF-8. JSON schemas match the library's
 *     file formats (see README.md).
 */

#ifndef COARSE_EXT_H
#define COARSE_EXT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coarse_status {
  COARSE_STATUS_OK = 0,
  COARSE_STATUS_VERIFICATION_FAILED = 1,
  COARSE_STATUS_INVALID_INPUT = 2,
  COARSE_STATUS_NULL_POINTER = 3,
  COARSE_STATUS_UTF8 = 4,
  COARSE_STATUS_PANIC = 5,
} coarse_status;

typedef struct CoarseSpace CoarseSpace;
typedef struct CoarseCover CoarseCover;

/* Copies the calling thread's last error message into buf (truncated,
 * NUL-terminated when len > 0) and returns the full message length. */
size_t coarse_last_error_message(char *buf, size_t len);

/* Static version string. */
const char *coarse_version(void);

/* ---- spaces ---- */

coarse_status coarse_space_from_json(const char *json, CoarseSpace **out);
coarse_status coarse_space_from_matrix(const double *values, size_t n,
                                       CoarseSpace **out);
coarse_status coarse_space_interval(int64_t start, int64_t end,
                                    CoarseSpace **out);
size_t coarse_space_point_count(const CoarseSpace *space);
coarse_status coarse_space_distance(const CoarseSpace *space, size_t i,
                                    size_t j, double *out);
coarse_status coarse_space_micro(const CoarseSpace *space, double m,
                                 CoarseSpace **out);
coarse_status coarse_space_macro(const CoarseSpace *space, double m,
                                 CoarseSpace **out);
coarse_status coarse_space_ball(const CoarseSpace *space, size_t center,
                                double radius, size_t *buf, size_t cap,
                                size_t *count);
void coarse_space_free(CoarseSpace *space);

/* ---- covers ---- */

coarse_status coarse_cover_from_json(const char *json, CoarseCover **out);
coarse_status coarse_brick_cover_line(int64_t start, int64_t end, int64_t l,
                                      CoarseCover **out);
coarse_status coarse_brick_cover_grid(int64_t start, int64_t end, int64_t l,
                                      CoarseCover **out);
size_t coarse_cover_member_count(const CoarseCover *cover);
size_t coarse_cover_multiplicity(const CoarseCover *cover);
coarse_status coarse_cover_mesh(const CoarseCover *cover, double *out);
coarse_status coarse_cover_lebesgue(const CoarseCover *cover, double *value,
                                    int32_t *is_infinite);
coarse_status coarse_ostrand_verify(const CoarseCover *cover, double r,
                                    size_t n, int32_t *verdict);
void coarse_cover_free(CoarseCover *cover);

#ifdef __cplusplus
}
#endif

#endif /* COARSE_EXT_H */
