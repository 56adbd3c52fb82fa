/* tslint:disable */
/* eslint-disable */

/**
 * A loaded scenario ready to solve.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    constructor(scenario: string, resolution: number);
    /**
     * 0 exterior, 1 interior, 2 boundary, per lattice node.
     */
    nodeKinds(): Uint8Array;
    nx(): number;
    ny(): number;
    solveEpsilon(eps: number): Solution;
    solveLimit(): Solution;
    species(): number;
}

/**
 * Result of one solve, species-major over the full `nx * ny` lattice.
 */
export class Solution {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    classS(): boolean;
    converged(): boolean;
    energy(): number;
    iterations(): number;
    overlap(): number;
    /**
     * `m * nx * ny` values; node `k` of species `i` is at `i * nx * ny + k`.
     */
    values(): Float64Array;
}

export function rateStudy1d(n: number, decades: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_solution_free: (a: number, b: number) => void;
    readonly demo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_nodeKinds: (a: number) => [number, number];
    readonly demo_nx: (a: number) => number;
    readonly demo_ny: (a: number) => number;
    readonly demo_solveEpsilon: (a: number, b: number) => [number, number, number];
    readonly demo_solveLimit: (a: number) => [number, number, number];
    readonly demo_species: (a: number) => number;
    readonly rateStudy1d: (a: number, b: number) => [number, number, number, number];
    readonly solution_classS: (a: number) => number;
    readonly solution_converged: (a: number) => number;
    readonly solution_energy: (a: number) => number;
    readonly solution_iterations: (a: number) => number;
    readonly solution_overlap: (a: number) => number;
    readonly solution_values: (a: number) => [number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
