# 
# test_Experiment.py
# 
# cellfreetools developers
# 
# Sweeps, traces, the oracle suite and the command line front end.
# 

import os
import numpy as np
import pytest
import cellfreetools.wireless.hybridBCD as hybridBCD
from cellfreetools.wireless.model import SystemConfig, ConfigError
from cellfreetools.wireless.experiment import ExperimentSpec, RESULTCOLUMNS, AGGREGATECOLUMNS, TRACECOLUMNS, \
    configAt, validateSpec, specFromDict, aggregate, runExperiment, runConvergenceTrace, runSolver, verifySeed, verify, \
    VERIFYTOL
from cellfreetools.wireless.channel import sampleChannel
from cellfreetools.wireless.metrics import wsr
from cellfreetools.statistics.statistics import std_mean
from cellfreetools.wireless.cli import main, EXIT_OK, EXIT_FAILED, EXIT_CONFIG
from cellfreetools.base.readWrite import readCSV
from cellfreetools.base.fileSystem import rm
from cellfreetools.interfaces.interfaces import writeYAML
from cellfreetools.testing import print_results, print_check, concludeTest


BASE = SystemConfig(num_aps=2, num_users=2, tx_grid=(2,2), rx_grid=(1,1), num_rf_chains=2, num_streams=1,
                    num_paths=4, max_iters=10)

SPEC = ExperimentSpec(base=BASE, axis='power_dbm', values=(10.,20.), solvers=('hybrid','fully_digital','zf','mrt'),
                      trials=2, seed=99, output='sweep/result.csv')


def withoutTiming(rows):
    return [ row[:8] + row[9:] for row in rows ]


def testSpec():

    lpass = True

    lpass *= print_check( configAt(SPEC,30.).max_power_dbm == 30., 'power axis' )
    cfg = configAt(ExperimentSpec(base=BASE,axis='num_tx_antennas',values=(16,)),16)
    lpass *= print_check( cfg.tx_grid == (4,4), 'square transmit grid' )
    lpass *= print_check( configAt(ExperimentSpec(base=BASE,axis='num_users'),3).U == 3, 'user axis' )
    lpass *= print_check( validateSpec(SPEC) is SPEC, 'valid sweep' )

    for change in [ dict(axis='bandwidth'), dict(solvers=('lp',)), dict(trials=0), dict(workers=0),
                    dict(values=()), dict(axis='num_tx_antennas', values=(10,)), dict(axis='num_users', values=(9,)),
                    dict(axis='num_aps', values=(1.5,)) ]:
        fields = dict(base=BASE, axis=SPEC.axis, values=SPEC.values, solvers=SPEC.solvers, trials=SPEC.trials)
        fields.update(change)
        with pytest.raises(ConfigError):
            validateSpec(ExperimentSpec(**fields))

    spec = specFromDict({'num_aps': 1, 'num_rf_chains': 4, 'axis': 'num_users', 'values': [1,2], 'seed': 5})
    lpass *= print_check( spec.seed == 5 and spec.base.seed == 5, 'seed shared by scenario and sweep' )
    lpass *= print_check( spec.base.tx_grid == (4,4) and spec.values == (1,2), 'document defaults' )
    with pytest.raises(ConfigError):
        specFromDict({'axes': 'power_dbm'})

    concludeTest(lpass)


def testAggregate():

    lpass = True

    nan  = float('nan')
    rows = [ ['power_dbm',10.,0,'zf',1.,1/np.log(2),0,5.,1.,'ok'],
             ['power_dbm',10.,1,'zf',3.,3/np.log(2),0,5.,1.,'ok'],
             ['power_dbm',10.,2,'zf',nan,nan,0,nan,1.,'error:rank'],
             ['power_dbm',10.,0,'mrt',nan,nan,0,nan,0.,'skipped'] ]
    table = aggregate(rows)
    lpass *= print_check( len(table) == 2 and all( len(row) == len(AGGREGATECOLUMNS) for row in table ), 'table shape' )
    lpass *= print_results( table[0][3:], [2,2.,1.,2/np.log(2),1/np.log(2)], text='mean and error over ok rows' )
    lpass *= print_check( table[1][3] == 0 and np.isnan(table[1][4]), 'group without ok rows' )

    concludeTest(lpass)


def testRunExperiment():

    lpass = True

    rows = runExperiment(SPEC)
    lpass *= print_check( len(rows) == 2*2*4 and all( len(row) == len(RESULTCOLUMNS) for row in rows ), 'one row per run' )
    lpass *= print_check( [ row[3] for row in rows[:4] ] == list(SPEC.solvers), 'solver order' )
    lpass *= print_check( [ (row[1],row[2]) for row in rows[::4] ] == [(10.,0),(10.,1),(20.,0),(20.,1)], 'row order' )
    lpass *= print_check( all( row[9] == 'ok' for row in rows ), 'all runs ok' )
    lpass *= print_results( [ row[5] for row in rows ], [ row[4]/np.log(2) for row in rows ], text='bits column' )
    lpass *= print_check( all( row[7] <= 10**(row[1]/10)*(1+1e-9) for row in rows ), 'budgets in the table' )

    header, table = readCSV('sweep/result.csv')
    lpass *= print_check( header == RESULTCOLUMNS and len(table) == len(rows), 'result file' )
    header, table = readCSV('sweep/result_aggregate.csv')
    lpass *= print_check( header == AGGREGATECOLUMNS and len(table) == 2*4, 'aggregate file' )

    again = runExperiment(SPEC,write=False)
    lpass *= print_check( withoutTiming(again) == withoutTiming(rows), 'same seed, same rows' )
    parallel = runExperiment(ExperimentSpec(base=BASE,values=SPEC.values,solvers=SPEC.solvers,trials=2,seed=99,
                                            workers=2),write=False)
    lpass *= print_check( withoutTiming(parallel) == withoutTiming(rows), 'worker count does not matter' )

    skipped = runExperiment(ExperimentSpec(base=BASE.replace(rx_grid=(2,1)),values=(20.,),solvers=('zf','fully_digital'),
                                           trials=1),write=False)
    lpass *= print_check( skipped[0][9] == 'skipped' and skipped[1][9] == 'ok', 'baselines skipped for N_r > 1' )

    trace = runConvergenceTrace(BASE,seed=4,output='sweep/trace.csv')
    header, table = readCSV('sweep/trace.csv')
    lpass *= print_check( header == TRACECOLUMNS and len(table) == len(trace), 'trace file' )
    solvers = [ row[1] for row in trace ]
    lpass *= print_check( solvers[0] == 'hybrid' and solvers[-1] == 'fully_digital', 'hybrid first' )
    starts = [ row for row in trace if row[0] == 0 ]
    lpass *= print_check( [ row[1] for row in starts ] == ['hybrid','fully_digital'], 'both traces start at 0' )

    rm('sweep')
    concludeTest(lpass)


def testVerify(monkeypatch):

    lpass = True

    result = verifySeed(7271978)
    lpass *= print_check( set(result) == set(VERIFYTOL), 'every oracle reported' )
    for check, value in result.items():
        lpass *= print_check( value <= VERIFYTOL[check], f'{check} = {value:.3e}' )

    rows, passed = verify(seeds=20)
    lpass *= print_check( passed and len(rows) == 20*len(VERIFYTOL), 'suite passes on 20 seeds' )

    monkeypatch.setattr(hybridBCD,'ANTILDESIGN',-1.)
    rows, passed = verify(seeds=1)
    lpass *= print_check( not passed, 'flipped cross-AP sign is caught' )
    failed = [ row[1] for row in rows if not row[4] ]
    lpass *= print_check( 'block_decomposition' in failed, 'caught by the decomposition check' )
    lpass *= print_check( main(['verify','--seeds','1']) == EXIT_FAILED, 'verify exit code on failure' )

    concludeTest(lpass)


def testCommandLine():

    lpass = True

    document = {'num_aps': 2, 'num_users': 2, 'tx_grid': [2,2], 'rx_grid': [1,1], 'num_rf_chains': 2,
                'num_streams': 1, 'num_paths': 4, 'max_iters': 5, 'axis': 'power_dbm', 'values': [10],
                'solvers': ['zf','mrt'], 'trials': 2, 'seed': 3}
    writeYAML(document,'cli.yaml')

    lpass *= print_check( main(['show-config','--config','cli.yaml']) == EXIT_OK, 'show-config' )
    lpass *= print_check( main(['sweep','--config','cli.yaml','--out','cli/sweep.csv','--values','10,20']) == EXIT_OK,
                          'sweep' )
    header, table = readCSV('cli/sweep.csv')
    lpass *= print_check( len(table) == 2*2*2 and table[-1][1] == '20', 'flags override the file' )
    lpass *= print_check( os.path.isfile('cli/sweep_aggregate.csv'), 'aggregate written' )
    lpass *= print_check( main(['trace','--config','cli.yaml','--out','cli/trace.csv']) == EXIT_OK, 'trace' )
    lpass *= print_check( os.path.isfile('cli/trace.csv'), 'trace written' )
    lpass *= print_check( main(['verify','--seeds','1']) == EXIT_OK, 'verify' )

    lpass *= print_check( main(['sweep','--config','cli.yaml','--axis','num_tx_antennas','--values','10']) == EXIT_CONFIG,
                          'non-square antenna count' )
    lpass *= print_check( main(['show-config','--config','missing.yaml']) == EXIT_CONFIG, 'missing file' )
    lpass *= print_check( main(['sweep','--values','ten']) == EXIT_CONFIG, 'non-numeric axis value' )
    lpass *= print_check( main(['sweep','--values','10,inf']) == EXIT_CONFIG, 'infinite axis value' )
    writeYAML({'num_rf_chains': 100},'bad.yaml')
    lpass *= print_check( main(['sweep','--config','bad.yaml']) == EXIT_CONFIG, 'violated dimension rule' )
    writeYAML({'colour': 'blue'},'bad.yaml')
    lpass *= print_check( main(['show-config','--config','bad.yaml']) == EXIT_CONFIG, 'unknown key' )

    for target in ['cli','cli.yaml','bad.yaml']:
        rm(target)
    concludeTest(lpass)


def testHybridGap():

    lpass = True

    # reference scenario on 4x4 arrays, seed-paired over 20 channels
    cfg = SystemConfig(tx_grid=(4,4))
    digital, hybrid8, hybrid16 = [], [], []
    for seed in range(20):
        channel = sampleChannel(cfg,seed)
        for rates, solver, current in [ (digital,'fully_digital',cfg), (hybrid8,'hybrid',cfg),
                                        (hybrid16,'hybrid',cfg.replace(num_rf_chains=16)) ]:
            stack, _ = runSolver(solver,current,channel)
            rates.append(wsr(stack,channel,current.noise_power,current.weights))
    fd, h8, h16 = std_mean(digital), std_mean(hybrid8), std_mean(hybrid16)
    lpass *= print_check( fd >= h8, f'fully digital {fd:.3f} >= hybrid with 8 RF chains {h8:.3f}' )
    lpass *= print_check( h16 >= 0.9*fd, f'hybrid with 16 RF chains {h16:.3f} within 90% of {fd:.3f}' )

    concludeTest(lpass)


def meanRates(spec) -> tuple:
    table = aggregate(runExperiment(spec,write=False))
    return [ row[4] for row in table ], all( row[3] == spec.trials for row in table )


def testTrends():

    lpass = True

    # reduced scenario, 10 channels per point
    base = SystemConfig(num_users=2, tx_grid=(4,4), rx_grid=(2,1), num_rf_chains=4, num_streams=1, max_iters=30)
    for axis, values in [ ('power_dbm',(10.,20.,30.,40.)), ('num_aps',(2,4,6)), ('num_tx_antennas',(16,36,64)) ]:
        means, complete = meanRates(ExperimentSpec(base=base,axis=axis,values=values,solvers=('hybrid',),trials=10,seed=17))
        lpass *= print_check( complete, f"no failed runs along {axis}" )
        lpass *= print_check( len(means) == len(values) and np.all(np.diff(means) > 0),
                              f'rate increases along {axis}: {np.round(means,3).tolist()}' )

    concludeTest(lpass)


if __name__ == '__main__':
    testSpec()
    testAggregate()
    testRunExperiment()
    testCommandLine()
    testHybridGap()
    testTrends()
