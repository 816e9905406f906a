// Copyright 2026 The ssmrom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to ssmrom. All objects are opaque handles created and
 * destroyed through this API. Every fallible call returns an ssmrom_status;
 * on failure a description is available from ssmrom_last_error() on the
 * calling thread until the next call on that thread. Handles may be used
 * from several threads only for read-only calls. */

#ifndef SSMROM_SSMROM_H_
#define SSMROM_SSMROM_H_

#include <stddef.h>

#if defined(_WIN32)
#define SSMROM_API __declspec(dllexport)
#else
#define SSMROM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssmrom_status {
  SSMROM_OK = 0,
  SSMROM_INVALID_ARGUMENT = 1,
  SSMROM_PARSE_ERROR = 2,
  SSMROM_IO_ERROR = 3,
  SSMROM_SOLVER_ERROR = 4,
  SSMROM_VALIDATION_FAILED = 5,
  SSMROM_NUMERIC_ERROR = 6,
  SSMROM_INTERNAL_ERROR = 7
} ssmrom_status;

typedef struct ssmrom_config ssmrom_config;  /* key = value settings */
typedef struct ssmrom_bench ssmrom_bench;    /* full-order bench at its static state */
typedef struct ssmrom_model ssmrom_model;    /* fitted manifold + normal form + bench */
typedef struct ssmrom_rom ssmrom_rom;        /* normal form alone */
typedef struct ssmrom_trajectory ssmrom_trajectory;

SSMROM_API const char* ssmrom_version(void);
SSMROM_API const char* ssmrom_last_error(void);
SSMROM_API const char* ssmrom_status_name(ssmrom_status status);

/* Configuration. Keys not set fall back to the library defaults. */
SSMROM_API ssmrom_status ssmrom_config_create(ssmrom_config** out);
SSMROM_API ssmrom_status ssmrom_config_load(const char* path, ssmrom_config** out);
SSMROM_API ssmrom_status ssmrom_config_set(ssmrom_config* config, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated, truncated to size); *found is 0
 * when the key is absent. */
SSMROM_API ssmrom_status ssmrom_config_get(const ssmrom_config* config, const char* key, char* buf,
                                           size_t size, int* found);
SSMROM_API void ssmrom_config_destroy(ssmrom_config* config);

/* Bench. */
typedef struct ssmrom_bench_info {
  int dofs;            /* physical DOFs including clamp DOFs */
  int joints;
  int modes;           /* underdamped linearized modes */
  double omega1;       /* rad/s, slowest two undamped chain frequencies */
  double omega2;
  double mid_ratio;    /* tuned middle-spring factor */
} ssmrom_bench_info;

typedef struct ssmrom_energy_audit {
  double e_start;
  double e_end;
  double damping_work;
  double friction_work;
  double forcing_work;
  double residual;     /* e_end - e_start + damping + friction - forcing */
} ssmrom_energy_audit;

SSMROM_API ssmrom_status ssmrom_bench_create(const ssmrom_config* config, ssmrom_bench** out);
SSMROM_API void ssmrom_bench_destroy(ssmrom_bench* bench);
SSMROM_API ssmrom_status ssmrom_bench_get_info(const ssmrom_bench* bench, ssmrom_bench_info* out);
/* Eigenvalues with positive imaginary part, slowest decay first. Writes up
 * to capacity entries and sets *count to the number available. */
SSMROM_API ssmrom_status ssmrom_bench_eigenvalues(const ssmrom_bench* bench, double* re, double* im,
                                                  int capacity, int* count);
SSMROM_API ssmrom_status ssmrom_bench_write_spectrum(const ssmrom_bench* bench, const char* path);
/* Free decay from one of the recipes "mode1", "mode2", "mixed",
 * "validation"; the trajectory table is written to path when non-NULL. */
SSMROM_API ssmrom_status ssmrom_bench_simulate(const ssmrom_bench* bench, const ssmrom_config* config,
                                               const char* recipe, const char* path,
                                               ssmrom_energy_audit* audit);
/* Steady amplitude (sqrt 2 x RMS over a period) of DOF dof under base
 * acceleration a cos(omega t), started from rest at the static state. */
SSMROM_API ssmrom_status ssmrom_bench_steady_amplitude(const ssmrom_bench* bench, double a, double omega,
                                                       int dof, double* amplitude);

/* Pipeline: simulate, fit, validate. Artifacts go to out_dir when non-NULL.
 * A validation NMTE above the threshold is not an error here; check
 * summary.passed. */
typedef struct ssmrom_summary {
  double validation_nmte;      /* percent */
  double threshold;            /* percent */
  int passed;
  double fit_residual;         /* relative */
  double omega_ratio;
} ssmrom_summary;

SSMROM_API ssmrom_status ssmrom_pipeline_run(const ssmrom_config* config, const char* out_dir,
                                             ssmrom_model** out, ssmrom_summary* summary);
SSMROM_API void ssmrom_model_destroy(ssmrom_model* model);
SSMROM_API ssmrom_status ssmrom_model_rom(const ssmrom_model* model, ssmrom_rom** out);

/* Forced response under base acceleration a over [omega_lo, omega_hi],
 * observed at DOF dof. The table is written to path when non-NULL. */
typedef struct ssmrom_frc_summary {
  int samples;
  int folds;
  int truncated;       /* branch left the fitted amplitude envelope */
  double peak_omega;   /* rad/s; 0 when no peak was found */
  double peak_amplitude;
} ssmrom_frc_summary;

SSMROM_API ssmrom_status ssmrom_model_frc(const ssmrom_model* model, double a, double omega_lo,
                                          double omega_hi, int dof, const char* path,
                                          ssmrom_frc_summary* summary);
/* Stable ROM amplitude at a single frequency, interpolated on the branch
 * continued across [0.9, 1.1] x omega1. */
SSMROM_API ssmrom_status ssmrom_model_frc_amplitude(const ssmrom_model* model, double a, double omega,
                                                    int dof, double* amplitude);

/* Normal form. */
SSMROM_API ssmrom_status ssmrom_rom_load(const char* path, ssmrom_rom** out);
SSMROM_API ssmrom_status ssmrom_rom_save(const ssmrom_rom* rom, const char* path);
SSMROM_API void ssmrom_rom_destroy(ssmrom_rom* rom);
SSMROM_API int ssmrom_rom_modes(const ssmrom_rom* rom);
/* Polar rates at amplitudes rho and phases theta (arrays of length modes). */
SSMROM_API ssmrom_status ssmrom_rom_polar_rhs(const ssmrom_rom* rom, const double* rho,
                                              const double* theta, double* rho_dot,
                                              double* theta_dot);
/* Backbone of mode `mode` (0-based) for rho in (0, rho_max] at `points`
 * values; writes the backbone and damping tables when the paths are
 * non-NULL. */
SSMROM_API ssmrom_status ssmrom_rom_backbone(const ssmrom_rom* rom, int mode, double rho_max, int points,
                                             const char* backbone_path, const char* damping_path);

/* Trajectory tables as written by ssmrom_bench_simulate. Components are
 * state rows: displacements 0..dofs-1, then velocities. */
SSMROM_API ssmrom_status ssmrom_trajectory_load(const char* path, ssmrom_trajectory** out);
SSMROM_API void ssmrom_trajectory_destroy(ssmrom_trajectory* traj);
SSMROM_API ssmrom_status ssmrom_trajectory_size(const ssmrom_trajectory* traj, int* samples, int* components);
/* Each copies `samples` values into out. */
SSMROM_API ssmrom_status ssmrom_trajectory_times(const ssmrom_trajectory* traj, double* out);
SSMROM_API ssmrom_status ssmrom_trajectory_component(const ssmrom_trajectory* traj, int component,
                                                     double* out);

/* Signal analysis. */
SSMROM_API ssmrom_status ssmrom_spectrogram(const double* signal, size_t n, double sample_rate,
                                            int window, int hop, const char* path, int* bins,
                                            int* frames);

typedef struct ssmrom_bolt_spec {
  double torque;           /* N m */
  double pitch;            /* m */
  double pitch_diameter;   /* m */
  double head_diameter;    /* m */
  double mu_thread;
  double mu_head;
} ssmrom_bolt_spec;

SSMROM_API ssmrom_status ssmrom_bolt_preload(const ssmrom_bolt_spec* spec, double* force);

#ifdef __cplusplus
}
#endif

#endif  /* SSMROM_SSMROM_H_ */
