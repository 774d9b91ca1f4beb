/* tslint:disable */
/* eslint-disable */

export class SvmResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    extent: number;
    iterations: number;
    labels: Float64Array;
    /**
     * Training points as interleaved `(u, v)` pairs.
     */
    points: Float64Array;
    /**
     * Decision values on a `grid_n x grid_n` grid over `[-extent, extent]^2`,
     * row-major with `v` decreasing down the rows.
     */
    surface: Float64Array;
    /**
     * Misclassified training points at the last iterate, in percent.
     */
    train_error_pct: number;
}

/**
 * Result of a deblurring run. Images are row-major with values in about [0, 1].
 */
export class TvResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    feasibility: Float64Array;
    /**
     * ISNR in dB per iteration, starting at iteration 0.
     */
    isnr: Float64Array;
    objective: Float64Array;
    observed: Float64Array;
    original: Float64Array;
    reconstructed: Float64Array;
}

/**
 * Scalar prox curve of `l1`, `box`, `hinge` or `hinge-conjugate` (label +1).
 */
export function prox_curve(kind: string, gamma: number, weight: number, lo: number, hi: number, n: number): Float64Array;

/**
 * Kernel SVM on two Gaussian blobs, with the decision surface on a grid.
 */
export function svm_surface(train_size: number, weight: number, sigma: number, tau: number, iters: number, grid_n: number, seed: number): SvmResult;

/**
 * Synthetic shapes image, blurred and noisy, restored by TV deblurring.
 */
export function tv_deblur(size: number, lambda: number, iters: number, isotropic: boolean, proximal: boolean, seed: number): TvResult;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_svmresult_extent: (a: number) => number;
    readonly __wbg_get_svmresult_iterations: (a: number) => number;
    readonly __wbg_get_svmresult_labels: (a: number) => [number, number];
    readonly __wbg_get_svmresult_points: (a: number) => [number, number];
    readonly __wbg_get_svmresult_surface: (a: number) => [number, number];
    readonly __wbg_get_svmresult_train_error_pct: (a: number) => number;
    readonly __wbg_get_tvresult_feasibility: (a: number) => [number, number];
    readonly __wbg_get_tvresult_isnr: (a: number) => [number, number];
    readonly __wbg_get_tvresult_objective: (a: number) => [number, number];
    readonly __wbg_get_tvresult_observed: (a: number) => [number, number];
    readonly __wbg_get_tvresult_original: (a: number) => [number, number];
    readonly __wbg_get_tvresult_reconstructed: (a: number) => [number, number];
    readonly __wbg_set_svmresult_extent: (a: number, b: number) => void;
    readonly __wbg_set_svmresult_iterations: (a: number, b: number) => void;
    readonly __wbg_set_svmresult_labels: (a: number, b: number, c: number) => void;
    readonly __wbg_set_svmresult_points: (a: number, b: number, c: number) => void;
    readonly __wbg_set_svmresult_surface: (a: number, b: number, c: number) => void;
    readonly __wbg_set_svmresult_train_error_pct: (a: number, b: number) => void;
    readonly __wbg_set_tvresult_feasibility: (a: number, b: number, c: number) => void;
    readonly __wbg_set_tvresult_isnr: (a: number, b: number, c: number) => void;
    readonly __wbg_set_tvresult_objective: (a: number, b: number, c: number) => void;
    readonly __wbg_set_tvresult_observed: (a: number, b: number, c: number) => void;
    readonly __wbg_set_tvresult_original: (a: number, b: number, c: number) => void;
    readonly __wbg_set_tvresult_reconstructed: (a: number, b: number, c: number) => void;
    readonly __wbg_svmresult_free: (a: number, b: number) => void;
    readonly __wbg_tvresult_free: (a: number, b: number) => void;
    readonly prox_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly svm_surface: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly tv_deblur: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
